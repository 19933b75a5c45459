//! Browser bindings: momentum history of the echo, the detuning resonance
//! against its large-N line shape, and the finite-pulse resonance.

use rotor_interferometer::analytic::i_eps_asymptotic;
use rotor_interferometer::ladder::momentum_history as ladder_history;
use rotor_interferometer::scan::{
    measure_fwhm, scan, ControlAxis, DeltaKickModel, Engine, FinitePulseModel, OutputModel,
};
use rotor_interferometer::{PhysicalParams, SequenceSpec};
use wasm_bindgen::prelude::*;

fn js(e: rotor_interferometer::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn rb85() -> PhysicalParams {
    PhysicalParams::rubidium85()
}

#[wasm_bindgen]
pub fn talbot_time_us() -> f64 {
    rb85().talbot_time * 1e6
}

/// Populations after each kick, row-major with `cols` sites per row.
#[wasm_bindgen]
pub struct History {
    q_min: i32,
    cols: usize,
    data: Vec<f64>,
    spreads: Vec<f64>,
}

#[wasm_bindgen]
impl History {
    #[wasm_bindgen(getter)]
    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.data.len() / self.cols
    }

    #[wasm_bindgen(getter)]
    pub fn data(&self) -> Vec<f64> {
        self.data.clone()
    }

    /// RMS momentum after each kick, ħκ.
    #[wasm_bindgen(getter)]
    pub fn spreads(&self) -> Vec<f64> {
        self.spreads.clone()
    }
}

#[wasm_bindgen]
pub fn momentum_history(pulses: usize, phi_d: f64, eps_ns: f64) -> Result<History, JsError> {
    let p = rb85();
    let spec = SequenceSpec::with_detuning(&p, pulses, phi_d, eps_ns * 1e-9).map_err(js)?;
    let h = ladder_history(&spec, 0.0, &p).map_err(js)?;
    let spreads = h.spreads();
    Ok(History {
        q_min: h.q_min as i32,
        cols: (h.q_max - h.q_min + 1) as usize,
        data: h.rows.concat(),
        spreads,
    })
}

/// A sampled resonance with an optional reference curve; control in ns.
#[wasm_bindgen]
pub struct Resonance {
    control_ns: Vec<f64>,
    output: Vec<f64>,
    reference: Vec<f64>,
    fwhm_ns: f64,
    center_ns: f64,
    peak: f64,
}

#[wasm_bindgen]
impl Resonance {
    #[wasm_bindgen(getter)]
    pub fn control_ns(&self) -> Vec<f64> {
        self.control_ns.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn output(&self) -> Vec<f64> {
        self.output.clone()
    }

    /// Empty when there is no reference curve.
    #[wasm_bindgen(getter)]
    pub fn reference(&self) -> Vec<f64> {
        self.reference.clone()
    }

    /// NaN when the width could not be measured.
    #[wasm_bindgen(getter)]
    pub fn fwhm_ns(&self) -> f64 {
        self.fwhm_ns
    }

    #[wasm_bindgen(getter)]
    pub fn center_ns(&self) -> f64 {
        self.center_ns
    }

    #[wasm_bindgen(getter)]
    pub fn peak(&self) -> f64 {
        self.peak
    }
}

fn resonance(
    model: &dyn OutputModel,
    half_span: f64,
    points: usize,
    reference: impl Fn(f64) -> f64,
) -> Result<Resonance, JsError> {
    let c = model.nominal_center();
    let curve = scan(model, (c - half_span, c + half_span), points).map_err(js)?;
    let (fwhm, center, peak) = match measure_fwhm(model, curve.fwhm.or(model.predicted_fwhm()), points) {
        Ok(m) => (m.fwhm, m.center, m.peak),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(Resonance {
        reference: curve.control.iter().map(|&x| reference(x)).collect(),
        control_ns: curve.control.iter().map(|x| x * 1e9).collect(),
        output: curve.output,
        fwhm_ns: fwhm * 1e9,
        center_ns: center * 1e9,
        peak,
    })
}

/// Exact ladder output against ε next to the large-N line shape.
#[wasm_bindgen]
pub fn eps_resonance(pulses: usize, phi_d: f64, points: usize) -> Result<Resonance, JsError> {
    let p = rb85();
    let model = DeltaKickModel::new(&p, pulses, phi_d, ControlAxis::Detuning, Engine::Ladder)
        .map_err(js)?;
    let w = model
        .predicted_fwhm()
        .ok_or_else(|| JsError::new("φ_d must be nonzero"))?;
    resonance(&model, 2.0 * w, points, |eps| i_eps_asymptotic(pulses, phi_d, eps, &p))
}

/// Finite-pulse output against ε around the l-th Talbot multiple.
#[wasm_bindgen]
pub fn finite_resonance(
    pulses: usize,
    gamma: f64,
    tau_us: f64,
    multiple: usize,
    points: usize,
) -> Result<Resonance, JsError> {
    let p = rb85();
    let model = FinitePulseModel::new(&p, pulses, gamma, tau_us * 1e-6, multiple, 0.0).map_err(js)?;
    let w = model
        .predicted_fwhm()
        .ok_or_else(|| JsError::new("pulse area must be nonzero"))?;
    // finite pulses broaden the resonance, so look further out
    resonance(&model, 4.0 * w, points, |_| f64::NAN).map(|mut r| {
        r.reference.clear();
        r
    })
}

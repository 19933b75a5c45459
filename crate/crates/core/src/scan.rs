//! Parameter sweeps and the quantities read off them: peak width and centre,
//! the pulse duration of narrowest resonance, power-law fits and the
//! finite-pulse peak shift.

use crate::analytic::{self, Control};
use crate::error::{Error, Result};
use crate::ladder::{fiber_quadrature, gaussian_output, run_askrs, SequenceSpec, Wavepacket, QUADRATURE_TOLERANCE};
use crate::par;
use crate::pulse::{duration_for_phi, FiniteSequence};
use crate::units::{phi_from_gamma, PhysicalParams};

/// Smallest number of samples accepted for a scan.
pub const MIN_SCAN_POINTS: usize = 32;
pub const DEFAULT_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlAxis {
    /// ε = T - lT_T, s.
    Detuning,
    /// p₀, kg·m/s.
    Momentum,
    /// a, m/s².
    Acceleration,
    /// τ_p, s.
    PulseDuration,
}

impl ControlAxis {
    /// CSV column name carrying the unit.
    pub fn column(self) -> &'static str {
        match self {
            ControlAxis::Detuning => "eps_s",
            ControlAxis::Momentum => "p0_kg_m_per_s",
            ControlAxis::Acceleration => "a_m_per_s2",
            ControlAxis::PulseDuration => "tau_p_s",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ControlAxis::Detuning => "detuning",
            ControlAxis::Momentum => "momentum",
            ControlAxis::Acceleration => "acceleration",
            ControlAxis::PulseDuration => "pulse-duration",
        }
    }
}

/// Something that maps a control value to an interferometer output.
pub trait OutputModel: Sync {
    fn axis(&self) -> ControlAxis;
    fn output(&self, x: f64) -> Result<f64>;
    /// Expected width of the central peak, used to choose a scan window.
    fn predicted_fwhm(&self) -> Option<f64>;
    /// Where the peak is expected.
    fn nominal_center(&self) -> f64 {
        0.0
    }
}

/// How a δ-kick output is computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Engine {
    /// Exact ladder evolution of the `p₀` fiber.
    Ladder,
    /// First-order phase sums.
    FirstOrder,
    /// Closed forms: the large-N ε line shape, or the cosine forms in p₀ and a.
    ClosedForm,
    /// Small-argument forms of the closed forms.
    Linearized,
    /// Ladder evolution averaged over the fibers of a Gaussian packet.
    Gaussian(Wavepacket),
}

/// δ-kick interferometer along one control axis, the others held at zero.
#[derive(Clone, Copy, Debug)]
pub struct DeltaKickModel {
    pub params: PhysicalParams,
    pub pulses: usize,
    pub phi_d: f64,
    pub axis: ControlAxis,
    pub engine: Engine,
}

impl DeltaKickModel {
    pub fn new(
        params: &PhysicalParams,
        pulses: usize,
        phi_d: f64,
        axis: ControlAxis,
        engine: Engine,
    ) -> Result<Self> {
        if axis == ControlAxis::PulseDuration {
            return Err(Error::invalid("δ-kicks have no pulse duration to scan"));
        }
        SequenceSpec::resonant(params, pulses, phi_d)?;
        Ok(Self {
            params: *params,
            pulses,
            phi_d,
            axis,
            engine,
        })
    }

    fn sequence(&self, x: f64) -> Result<SequenceSpec> {
        let p = &self.params;
        match self.axis {
            ControlAxis::Detuning => SequenceSpec::with_detuning(p, self.pulses, self.phi_d, x),
            ControlAxis::Acceleration => {
                Ok(SequenceSpec::resonant(p, self.pulses, self.phi_d)?.with_acceleration(x))
            }
            _ => SequenceSpec::resonant(p, self.pulses, self.phi_d),
        }
    }

    fn control(&self, x: f64) -> Control {
        match self.axis {
            ControlAxis::Detuning => Control::Detuning(x),
            ControlAxis::Momentum => Control::Momentum(x),
            _ => Control::Acceleration(x),
        }
    }
}

impl OutputModel for DeltaKickModel {
    fn axis(&self) -> ControlAxis {
        self.axis
    }

    fn output(&self, x: f64) -> Result<f64> {
        let p = &self.params;
        let (n, phi) = (self.pulses, self.phi_d);
        match self.engine {
            Engine::Ladder => {
                let beta = if self.axis == ControlAxis::Momentum {
                    p.momentum_to_ladder(x)
                } else {
                    0.0
                };
                Ok(run_askrs(&self.sequence(x)?, beta, p)?.output)
            }
            Engine::FirstOrder => analytic::output_first_order(n, phi, self.control(x), p),
            Engine::ClosedForm => Ok(match self.axis {
                ControlAxis::Detuning => analytic::i_eps_asymptotic(n, phi, x, p),
                ControlAxis::Momentum => analytic::i_p0_closed(n, phi, x, p),
                _ => analytic::i_accel_closed(n, phi, x, p),
            }),
            Engine::Linearized => Ok(match self.axis {
                ControlAxis::Detuning => analytic::i_eps_asymptotic(n, phi, x, p),
                ControlAxis::Momentum => analytic::i_p0_linearized(n, phi, x, p),
                _ => analytic::i_accel_linearized(n, phi, x, p),
            }),
            Engine::Gaussian(wp) => {
                if self.axis == ControlAxis::Momentum {
                    // packet centred on p₀: shift the fiber weights
                    let spec = self.sequence(0.0)?;
                    let centre = p.momentum_to_ladder(x);
                    let hw = spec.half_width();
                    let feature = 0.18 / ((n * n) as f64 * phi.abs().max(1e-3));
                    fiber_quadrature(wp.ladder_width(p), feature, QUADRATURE_TOLERANCE, |b| {
                        crate::ladder::run_askrs_with_half_width(&spec, centre + b, p, hw)
                            .map(|o| o.output)
                    })
                    .map(|q| q.output)
                } else {
                    gaussian_output(&self.sequence(x)?, &wp, p).map(|q| q.output)
                }
            }
        }
    }

    fn predicted_fwhm(&self) -> Option<f64> {
        let p = &self.params;
        let (n, phi) = (self.pulses, self.phi_d);
        if phi == 0.0 {
            return None;
        }
        Some(match self.axis {
            ControlAxis::Detuning => analytic::fwhm_eps_asymptotic(n, phi, p),
            ControlAxis::Momentum => analytic::fwhm_p0_closed(n, phi, p)
                .unwrap_or_else(|| analytic::fwhm_p0_linearized(n, phi, p)),
            _ => analytic::fwhm_accel_closed(n, phi, p)
                .unwrap_or_else(|| analytic::fwhm_accel_linearized(n, phi, p)),
        })
    }
}

/// Finite-pulse output against the detuning from the l-th Talbot multiple.
#[derive(Clone, Debug)]
pub struct FinitePulseModel {
    params: PhysicalParams,
    sequence: FiniteSequence,
    multiple: usize,
    gamma: f64,
}

impl FinitePulseModel {
    pub fn new(
        params: &PhysicalParams,
        pulses: usize,
        gamma: f64,
        duration: f64,
        multiple: usize,
        beta: f64,
    ) -> Result<Self> {
        if multiple == 0 {
            return Err(Error::invalid("the Talbot multiple must be at least 1"));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("γ must be positive, got {gamma}")));
        }
        let depth = params.depth_from_gamma(gamma);
        let sequence = FiniteSequence::new(params, pulses, depth, duration, beta)?;
        Ok(Self {
            params: *params,
            sequence,
            multiple,
            gamma,
        })
    }

    pub fn sequence(&self) -> &FiniteSequence {
        &self.sequence
    }

    /// Resonant period lT_T.
    pub fn resonance(&self) -> f64 {
        self.multiple as f64 * self.params.talbot_time
    }
}

impl OutputModel for FinitePulseModel {
    fn axis(&self) -> ControlAxis {
        ControlAxis::Detuning
    }

    fn output(&self, eps: f64) -> Result<f64> {
        self.sequence.output(self.resonance() + eps)
    }

    /// The δ-kick asymptotic width at the same φ_d.
    fn predicted_fwhm(&self) -> Option<f64> {
        let phi = phi_from_gamma(&self.params, self.gamma, self.sequence.duration());
        (phi > 0.0).then(|| {
            analytic::fwhm_eps_asymptotic(self.sequence.pulses(), phi, &self.params)
        })
    }
}

/// Sampled output curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanCurve {
    pub axis: ControlAxis,
    pub control: Vec<f64>,
    pub output: Vec<f64>,
    pub peak_center: Option<f64>,
    pub fwhm: Option<f64>,
}

/// Width, centre and height of the central peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakMetrics {
    pub fwhm: f64,
    pub center: f64,
    pub peak: f64,
}

/// Samples `model` at `n_points` evenly spaced values spanning `range`.
/// Peak metrics are filled in when a central peak is bracketed.
pub fn scan(model: &dyn OutputModel, range: (f64, f64), n_points: usize) -> Result<ScanCurve> {
    if n_points < MIN_SCAN_POINTS {
        return Err(Error::invalid(format!(
            "a scan needs at least {MIN_SCAN_POINTS} points, got {n_points}"
        )));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(format!("scan range [{lo:e}, {hi:e}] is empty")));
    }
    let step = (hi - lo) / (n_points - 1) as f64;
    let control: Vec<f64> = (0..n_points).map(|i| lo + i as f64 * step).collect();
    let output = par::map(&control, |&x| model.output(x))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut curve = ScanCurve {
        axis: model.axis(),
        control,
        output,
        peak_center: None,
        fwhm: None,
    };
    if let Ok(m) = extract_fwhm(&curve) {
        curve.peak_center = Some(m.center);
        curve.fwhm = Some(m.fwhm);
    }
    Ok(curve)
}

/// Scan window of four predicted widths around the expected peak, widened
/// fourfold once if the peak is not bracketed.
pub fn scan_auto(model: &dyn OutputModel, n_points: usize) -> Result<ScanCurve> {
    let w = model
        .predicted_fwhm()
        .ok_or_else(|| Error::invalid("no width prediction available; give an explicit range"))?;
    let c = model.nominal_center();
    let first = scan(model, (c - 2.0 * w, c + 2.0 * w), n_points)?;
    if first.fwhm.is_some() {
        return Ok(first);
    }
    let second = scan(model, (c - 8.0 * w, c + 8.0 * w), n_points)?;
    match extract_fwhm(&second) {
        Ok(_) => Ok(second),
        Err(e) => Err(e),
    }
}

/// Index of the global maximum and the sample indices just inside the
/// half-maximum crossings on either side.
fn bracket_peak(x: &[f64], y: &[f64], level_of: impl Fn(f64) -> f64) -> Result<(usize, usize, usize)> {
    let n = y.len();
    let imax = (0..n)
        .max_by(|&a, &b| y[a].total_cmp(&y[b]).then(b.cmp(&a)))
        .ok_or_else(|| Error::PeakNotBracketed("empty curve".into()))?;
    let level = level_of(y[imax]);
    let mut l = imax;
    while l > 0 && y[l - 1] >= level {
        l -= 1;
    }
    let mut r = imax;
    while r + 1 < n && y[r + 1] >= level {
        r += 1;
    }
    if l == 0 || r + 1 == n {
        return Err(Error::PeakNotBracketed(format!(
            "half maximum not reached inside [{:e}, {:e}]",
            x[0],
            x[n - 1]
        )));
    }
    // any other local maximum above half of the peak makes the width ambiguous
    for i in 1..n - 1 {
        if (i < l || i > r) && y[i] >= y[i - 1] && y[i] >= y[i + 1] && y[i] >= level {
            return Err(Error::Multimodal(format!(
                "secondary maximum {:.4} at {:e} exceeds half of the peak {:.4}",
                y[i], x[i], y[imax]
            )));
        }
    }
    Ok((imax, l, r))
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a >= 0.0 || !a.is_finite() {
        return (x[1], y[1]);
    }
    let b = d1 - a * (x[0] + x[1]);
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    let yv = y[1] + (xv - x[1]) * (d1 + a * (xv - x[0]));
    (xv, yv.max(y[1]))
}

/// FWHM and centre of the central peak of a sampled curve: parabolic
/// interpolation through the highest sample and its neighbours, linear
/// interpolation of the half-maximum crossings.
pub fn extract_fwhm(curve: &ScanCurve) -> Result<PeakMetrics> {
    let (x, y) = (&curve.control, &curve.output);
    if x.len() < 3 || x.len() != y.len() {
        return Err(Error::invalid("curve needs at least three samples"));
    }
    let (imax, _, _) = bracket_peak(x, y, |p| 0.5 * p)?;
    let (center, peak) = if imax == 0 || imax + 1 == x.len() {
        (x[imax], y[imax])
    } else {
        parabola_vertex(
            [x[imax - 1], x[imax], x[imax + 1]],
            [y[imax - 1], y[imax], y[imax + 1]],
        )
    };
    let level = 0.5 * peak;
    let (_, l, r) = bracket_peak(x, y, |_| level)?;
    let cross = |i: usize, j: usize| x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i]);
    let left = cross(l - 1, l);
    let right = cross(r, r + 1);
    Ok(PeakMetrics {
        fwhm: right - left,
        center,
        peak,
    })
}

/// Golden-section minimum of `f` on `[a, b]`, stopping when the bracket is
/// shorter than `tol`.
pub fn golden_section_minimize(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Root of `g` between `a` and `b`, where `g` changes sign, by the Illinois
/// variant of regula falsi.
fn crossing(mut g: impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut ga = g(a)?;
    let mut gb = g(b)?;
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * gb - b * ga) / (gb - ga);
        if (b - a).abs() < tol {
            return Ok(c);
        }
        let gc = g(c)?;
        if gc == 0.0 {
            return Ok(c);
        }
        if (gc > 0.0) == (gb > 0.0) {
            b = c;
            gb = gc;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            ga = gc;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() < tol {
            return Ok(0.5 * (a + b));
        }
    }
    Ok(0.5 * (a + b))
}

/// Measures the central peak of a live model: scan around the expected
/// peak (widened once if needed), re-scan narrowed to the peak when it is
/// under-resolved, then locate the maximum by golden section and the
/// half-maximum crossings by root finding on the model itself.
pub fn measure_fwhm(model: &dyn OutputModel, width_hint: Option<f64>, n_points: usize) -> Result<PeakMetrics> {
    let n = n_points.max(MIN_SCAN_POINTS);
    let w = width_hint
        .or_else(|| model.predicted_fwhm())
        .filter(|w| *w > 0.0 && w.is_finite())
        .ok_or_else(|| Error::invalid("no width estimate for the scan window"))?;
    let c = model.nominal_center();
    let mut curve = scan(model, (c - 2.0 * w, c + 2.0 * w), n)?;
    let mut coarse = extract_fwhm(&curve);
    if matches!(coarse, Err(Error::PeakNotBracketed(_))) {
        curve = scan(model, (c - 8.0 * w, c + 8.0 * w), n)?;
        coarse = extract_fwhm(&curve);
    }
    let coarse = coarse?;
    let spacing = curve.control[1] - curve.control[0];
    if coarse.fwhm < 8.0 * spacing {
        let half = 2.0 * coarse.fwhm.max(2.0 * spacing);
        curve = scan(model, (coarse.center - half, coarse.center + half), n)?;
        extract_fwhm(&curve)?;
    }
    let (x, y) = (&curve.control, &curve.output);
    let spacing = x[1] - x[0];
    let (imax, _, _) = bracket_peak(x, y, |p| 0.5 * p)?;
    let lo = x[imax.saturating_sub(1)];
    let hi = x[(imax + 1).min(x.len() - 1)];
    let (center, neg) = golden_section_minimize(
        |t| model.output(t).map(|v| -v).unwrap_or(f64::INFINITY),
        lo,
        hi,
        1e-7 * spacing,
    );
    let peak = (-neg).max(y[imax]);
    if !peak.is_finite() {
        return Err(Error::PeakNotBracketed("model failed at the peak".into()));
    }
    let level = 0.5 * peak;
    let (_, l, r) = bracket_peak(x, y, |_| level)?;
    let tol = 1e-9 * spacing;
    let left = crossing(|t| Ok(model.output(t)? - level), x[l - 1], x[l], tol)?;
    let right = crossing(|t| Ok(model.output(t)? - level), x[r], x[r + 1], tol)?;
    Ok(PeakMetrics {
        fwhm: right - left,
        center,
        peak,
    })
}

/// Narrowest finite-pulse resonance found by [`find_tau_min`].
#[derive(Clone, Debug, PartialEq)]
pub struct TauMinimum {
    pub tau_min: f64,
    pub w_min: f64,
    /// Coarse grid visited: pulse duration and width, `None` where the width
    /// could not be measured.
    pub coarse: Vec<(f64, Option<f64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauSearchOptions {
    /// Points of the geometric grid between the lower bound and T_T/2.
    pub coarse_points: usize,
    /// Relative resolution of the refined τ_min.
    pub rel_tol: f64,
    /// Samples per width measurement.
    pub scan_points: usize,
}

impl Default for TauSearchOptions {
    fn default() -> Self {
        Self {
            coarse_points: 32,
            rel_tol: 1e-3,
            scan_points: DEFAULT_POINTS,
        }
    }
}

/// FWHM in ε of the finite-pulse resonance at pulse duration τ.
pub fn fwhm_at_duration(
    params: &PhysicalParams,
    pulses: usize,
    gamma: f64,
    duration: f64,
    width_hint: Option<f64>,
    scan_points: usize,
) -> Result<PeakMetrics> {
    let model = FinitePulseModel::new(params, pulses, gamma, duration, 1, 0.0)?;
    measure_fwhm(&model, width_hint, scan_points)
}

/// Sweeps τ_p over `taus` and measures the ε-resonance width at each.
pub fn fwhm_vs_duration(
    params: &PhysicalParams,
    pulses: usize,
    gamma: f64,
    taus: &[f64],
    scan_points: usize,
) -> Vec<Result<PeakMetrics>> {
    par::map(taus, |&t| fwhm_at_duration(params, pulses, gamma, t, None, scan_points))
}

/// Lower end of the τ_p search: the duration at which the δ-kick width
/// prediction equals T_T/20.
fn tau_search_floor(params: &PhysicalParams, pulses: usize, gamma: f64) -> f64 {
    let n = pulses as f64;
    // δ-kick FWHM ≈ 1.075 T_T/(N³φ²); φ² = 21.5/N³ gives T_T/20
    duration_for_phi(params, gamma, (21.5 / (n * n * n)).sqrt())
}

/// Pulse duration minimising the ε-resonance width at fixed (N, γ).
///
/// Walks a geometric grid upward from a floor where pulses are effectively
/// δ-kicks, stopping once the width has risen on two consecutive points past
/// the best one, then refines by golden section. Widths that cannot be
/// measured count as infinite.
pub fn find_tau_min(
    params: &PhysicalParams,
    pulses: usize,
    gamma: f64,
    options: &TauSearchOptions,
) -> Result<TauMinimum> {
    if gamma.is_nan() || gamma <= 0.0 || pulses == 0 {
        return Err(Error::invalid("τ_min search needs γ > 0 and N ≥ 1"));
    }
    if gamma * pulses as f64 <= 1.0 {
        return Err(Error::invalid(format!(
            "γN = {} ≤ 1: outside the regime where the width has an interior minimum",
            gamma * pulses as f64
        )));
    }
    if options.coarse_points < 16 {
        return Err(Error::invalid("the coarse τ grid needs at least 16 points"));
    }
    let lo = tau_search_floor(params, pulses, gamma);
    let hi = 0.5 * params.talbot_time;
    if lo >= hi {
        return Err(Error::invalid("τ search floor lies above T_T/2"));
    }
    let ratio = (hi / lo).powf(1.0 / (options.coarse_points - 1) as f64);
    let taus: Vec<f64> = (0..options.coarse_points)
        .map(|i| if i + 1 == options.coarse_points { hi } else { lo * ratio.powi(i as i32) })
        .collect();

    let width = |tau: f64, hint: Option<f64>| -> Option<f64> {
        fwhm_at_duration(params, pulses, gamma, tau, hint, options.scan_points)
            .ok()
            .map(|m| m.fwhm)
    };

    let mut coarse: Vec<(f64, Option<f64>)> = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    let mut rises = 0;
    let mut hint = None;
    for (i, &tau) in taus.iter().enumerate() {
        let w = width(tau, hint);
        coarse.push((tau, w));
        if let Some(w) = w {
            hint = Some(w);
        }
        let wv = w.unwrap_or(f64::INFINITY);
        match best {
            Some((_, bw)) if wv >= bw => {
                rises += 1;
                if rises >= 2 {
                    break;
                }
            }
            _ if wv.is_finite() => {
                best = Some((i, wv));
                rises = 0;
            }
            _ => {}
        }
    }
    let (ib, bw) = best.ok_or_else(|| {
        Error::NoInteriorMinimum("no pulse duration gave a measurable width".into())
    })?;
    if ib == 0 || ib + 1 >= coarse.len() {
        return Err(Error::NoInteriorMinimum(format!(
            "width is smallest at the end of the searched range (τ = {:e} s)",
            coarse[ib].0
        )));
    }
    let (a, b) = (coarse[ib - 1].0, coarse[ib + 1].0);
    let tol = options.rel_tol * coarse[ib].0;
    let (tau_min, w_min) = golden_section_minimize(
        |t| width(t, Some(bw)).unwrap_or(f64::INFINITY),
        a,
        b,
        tol,
    );
    let (tau_min, w_min) = if w_min <= bw { (tau_min, w_min) } else { (coarse[ib].0, bw) };
    Ok(TauMinimum {
        tau_min,
        w_min,
        coarse,
    })
}

/// Least-squares line through `(log N, log(value·scale))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Largest relative deviation of a point from the fitted law.
    pub residual: f64,
}

impl ScalingFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.prefactor * n.powf(self.exponent)
    }
}

/// Power-law fit over at least four points spanning a decade.
pub fn fit_scaling(points: &[(f64, f64)], scale_factor: f64) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if hi < 10.0 * lo {
        return Err(Error::InsufficientData(format!(
            "points span {lo}..{hi}, less than a decade"
        )));
    }
    fit_power_law(points, scale_factor)
}

/// Power-law fit without the span requirement; at least two distinct
/// abscissae.
pub fn fit_power_law(points: &[(f64, f64)], scale_factor: f64) -> Result<ScalingFit> {
    if points.iter().any(|&(n, v)| !(n > 0.0 && v * scale_factor > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive abscissae and values"));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 * scale_factor).ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if points.len() < 2 || sxx <= 0.0 {
        return Err(Error::InsufficientData("need two distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let prefactor = (my - exponent * mx).exp();
    let fit = ScalingFit {
        exponent,
        prefactor,
        residual: 0.0,
    };
    let residual = points
        .iter()
        .map(|&(n, v)| (v * scale_factor / fit.predict(n) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit { residual, ..fit })
}

/// Offset of the finite-pulse resonance from lT_T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakShift {
    pub delta_eps: f64,
    pub peak: f64,
    pub fwhm: f64,
}

pub fn measure_peak_shift(
    params: &PhysicalParams,
    pulses: usize,
    gamma: f64,
    duration: f64,
    multiple: usize,
    width_hint: Option<f64>,
) -> Result<PeakShift> {
    let model = FinitePulseModel::new(params, pulses, gamma, duration, multiple, 0.0)?;
    let m = measure_fwhm(&model, width_hint, DEFAULT_POINTS)?;
    Ok(PeakShift {
        delta_eps: m.center,
        peak: m.peak,
        fwhm: m.fwhm,
    })
}

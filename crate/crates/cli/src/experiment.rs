//! One function per experiment kind. Each returns the CSV table and the
//! metrics object for the sidecar; nothing here touches the file system.

use rayon::prelude::*;
use rotor_interferometer::analytic;
use rotor_interferometer::ladder::{momentum_history, run_askrs};
use rotor_interferometer::scan::{
    find_tau_min, fit_power_law, fit_scaling, measure_fwhm, measure_peak_shift, scan, scan_auto,
    ControlAxis, DeltaKickModel, Engine, FinitePulseModel, OutputModel, PeakMetrics, ScalingFit,
    ScanCurve, TauSearchOptions,
};
use rotor_interferometer::units::phi_from_gamma;
use rotor_interferometer::{PhysicalParams, SequenceSpec, Wavepacket};
use serde_json::{json, Map, Value};

use crate::config::{Kind, RunConfig};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Real(x) => format!("{x:e}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }
}

/// Everything a run produces before it is written out.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub table: Table,
    pub derived: Map<String, Value>,
    pub metrics: Map<String, Value>,
}

pub fn params(cfg: &RunConfig) -> Result<PhysicalParams, CliError> {
    let mass = cfg.real("mass_u").expect("mass_u has a default");
    let lambda = cfg.real("lambda_nm").expect("lambda_nm has a default");
    Ok(PhysicalParams::from_lab_units(mass, lambda)?)
}

fn required_count(cfg: &RunConfig, key: &str) -> usize {
    cfg.count(key).unwrap_or_else(|| panic!("`{key}` is validated as required"))
}

fn required_real(cfg: &RunConfig, key: &str) -> f64 {
    cfg.real(key).unwrap_or_else(|| panic!("`{key}` is validated as required"))
}

/// δ-kick strength, directly or from (γ, τ_p).
fn kick_strength(cfg: &RunConfig, p: &PhysicalParams) -> f64 {
    match cfg.real("phi_d") {
        Some(phi) => phi,
        None => phi_from_gamma(p, required_real(cfg, "gamma"), required_real(cfg, "tau_p_us") * 1e-6),
    }
}

fn engine(cfg: &RunConfig) -> Result<Engine, CliError> {
    if let Some(sigma) = cfg.real("sigma_um") {
        return Ok(Engine::Gaussian(Wavepacket::new(sigma * 1e-6)?));
    }
    Ok(match cfg.word("engine").unwrap_or("ladder") {
        "first-order" => Engine::FirstOrder,
        "closed-form" => Engine::ClosedForm,
        "linearized" => Engine::Linearized,
        _ => Engine::Ladder,
    })
}

fn fit_json(fit: &ScalingFit) -> Value {
    json!({
        "exponent": fit.exponent,
        "prefactor": fit.prefactor,
        "residual": fit.residual,
    })
}

fn peak_json(m: &PeakMetrics) -> Value {
    json!({ "fwhm": m.fwhm, "center": m.center, "peak": m.peak })
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = params(cfg)?;
    let mut derived = Map::new();
    derived.insert("talbot_time_s".into(), json!(p.talbot_time));
    derived.insert("omega_r_rad_per_s".into(), json!(p.omega_r));
    derived.insert("recoil_momentum_kg_m_per_s".into(), json!(p.recoil_momentum()));
    if let Some(g) = cfg.real("gamma") {
        derived.insert("gamma".into(), json!(g));
        derived.insert("depth_j".into(), json!(p.depth_from_gamma(g)));
    }
    if cfg.kind != Kind::TauMinSweep && cfg.kind != Kind::FiniteScan && cfg.kind != Kind::PeakShift
    {
        derived.insert("phi_d".into(), json!(kick_strength(cfg, &p)));
    }
    let (table, metrics) = match cfg.kind {
        Kind::Echo => echo(cfg, &p)?,
        Kind::MomentumHistory => history(cfg, &p)?,
        Kind::ScanEps => delta_scan(cfg, &p, ControlAxis::Detuning)?,
        Kind::ScanP0 => delta_scan(cfg, &p, ControlAxis::Momentum)?,
        Kind::ScanAccel => delta_scan(cfg, &p, ControlAxis::Acceleration)?,
        Kind::FiniteScan => finite_scan(cfg, &p)?,
        Kind::TauMinSweep => tau_min_sweep(cfg, &p)?,
        Kind::FitScaling => scaling(cfg, &p)?,
        Kind::PeakShift => peak_shift(cfg, &p)?,
    };
    Ok(Report {
        table,
        derived,
        metrics,
    })
}

type Output = (Table, Map<String, Value>);

fn sequence(cfg: &RunConfig, p: &PhysicalParams) -> Result<(SequenceSpec, f64), CliError> {
    let n = required_count(cfg, "n");
    let spec = SequenceSpec::with_detuning(p, n, kick_strength(cfg, p), cfg.real("eps_s").unwrap_or(0.0))?
        .with_acceleration(cfg.real("accel_m_s2").unwrap_or(0.0));
    let beta = cfg.real("p0_hbar_kappa").unwrap_or(0.0);
    Ok((spec, beta))
}

fn echo(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let (spec, beta) = sequence(cfg, p)?;
    let out = run_askrs(&spec, beta, p)?;
    let mut table = Table::new(["n", "eps_s", "p0_hbar_kappa", "a_m_per_s2", "output"]);
    table.rows.push(vec![
        Cell::Int(spec.pulses as i64),
        Cell::Real(spec.detuning(p)),
        Cell::Real(beta),
        Cell::Real(spec.acceleration),
        Cell::Real(out.output),
    ]);
    let mut m = Map::new();
    m.insert("I".into(), json!(out.output));
    m.insert("momentum_spread_hbar_kappa".into(), json!(out.state.momentum_spread()));
    Ok((table, m))
}

fn history(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let (spec, beta) = sequence(cfg, p)?;
    let h = momentum_history(&spec, beta, p)?;
    let mut header = vec!["kick".to_string(), "spread_hbar_kappa".to_string()];
    header.extend((h.q_min..=h.q_max).map(|q| format!("pop_q{q}")));
    let mut table = Table::new(header);
    let spreads = h.spreads();
    for (k, row) in h.rows.iter().enumerate() {
        let mut cells = vec![Cell::Int(k as i64 + 1), Cell::Real(spreads[k])];
        cells.extend(row.iter().map(|&x| Cell::Real(x)));
        table.rows.push(cells);
    }
    let last = h.rows.last().expect("at least two kicks");
    let mut m = Map::new();
    m.insert("I".into(), json!(last[(-h.q_min) as usize]));
    m.insert("q_min".into(), json!(h.q_min));
    m.insert("q_max".into(), json!(h.q_max));
    m.insert(
        "max_spread_hbar_kappa".into(),
        json!(spreads.iter().cloned().fold(0.0, f64::max)),
    );
    Ok((table, m))
}

fn curve_table(curve: &ScanCurve) -> Table {
    let mut table = Table::new([curve.axis.column(), "output"]);
    for (x, y) in curve.control.iter().zip(&curve.output) {
        table.rows.push(vec![Cell::Real(*x), Cell::Real(*y)]);
    }
    table
}

fn scan_model(cfg: &RunConfig, model: &dyn OutputModel) -> Result<Output, CliError> {
    let points = required_count(cfg, "points");
    let curve = match cfg.pair("range") {
        Some(r) => scan(model, r, points)?,
        None => scan_auto(model, points)?,
    };
    let mut m = Map::new();
    m.insert("axis".into(), json!(curve.axis.name()));
    let predicted = model.predicted_fwhm();
    m.insert("predicted_fwhm".into(), json!(predicted));
    match measure_fwhm(model, curve.fwhm.or(predicted), points) {
        Ok(pk) => {
            m.insert("peak".into(), peak_json(&pk));
            if let Some(w) = predicted {
                m.insert("fwhm_relative_to_prediction".into(), json!(pk.fwhm / w));
            }
        }
        Err(e) => {
            m.insert("peak".into(), Value::Null);
            m.insert("peak_error".into(), json!(e.to_string()));
        }
    }
    Ok((curve_table(&curve), m))
}

fn delta_scan(cfg: &RunConfig, p: &PhysicalParams, axis: ControlAxis) -> Result<Output, CliError> {
    let n = required_count(cfg, "n");
    let model = DeltaKickModel::new(p, n, kick_strength(cfg, p), axis, engine(cfg)?)?;
    scan_model(cfg, &model)
}

fn finite_scan(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let model = FinitePulseModel::new(
        p,
        required_count(cfg, "n"),
        required_real(cfg, "gamma"),
        required_real(cfg, "tau_p_us") * 1e-6,
        required_count(cfg, "multiple"),
        cfg.real("p0_hbar_kappa").unwrap_or(0.0),
    )?;
    let (table, mut m) = scan_model(cfg, &model)?;
    m.insert("resonance_s".into(), json!(model.resonance()));
    m.insert("ladder_half_width".into(), json!(model.sequence().half_width()));
    Ok((table, m))
}

fn tau_min_sweep(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let gamma = required_real(cfg, "gamma");
    let ns = cfg.counts("n_list").expect("n_list has a default");
    let options = TauSearchOptions {
        coarse_points: required_count(cfg, "coarse_points"),
        scan_points: required_count(cfg, "points"),
        ..TauSearchOptions::default()
    };
    let found = ns
        .par_iter()
        .map(|&n| find_tau_min(p, n, gamma, &options))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new([
        "n",
        "tau_min_s",
        "w_min_s",
        "w_min_gamma_n2_s",
        "tau_min_sqrt_gamma_n_s",
    ]);
    let mut widths = Vec::new();
    let mut durations = Vec::new();
    for (&n, t) in ns.iter().zip(&found) {
        let nf = n as f64;
        table.rows.push(vec![
            Cell::Int(n as i64),
            Cell::Real(t.tau_min),
            Cell::Real(t.w_min),
            Cell::Real(t.w_min * gamma * nf * nf),
            Cell::Real(t.tau_min * (gamma * nf).sqrt()),
        ]);
        widths.push((nf, t.w_min));
        durations.push((nf, t.tau_min));
    }
    let mut m = Map::new();
    if ns.len() >= 2 {
        let tt = p.talbot_time;
        m.insert("w_min_fit".into(), fit_json(&fit_power_law(&widths, 1.0 / tt)?));
        m.insert("tau_min_fit".into(), fit_json(&fit_power_law(&durations, 1.0 / tt)?));
        m.insert("fit_units".into(), json!("prefactor in units of T_T"));
    }
    Ok((table, m))
}

fn scaling(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let axis = match cfg.word("axis").unwrap_or("eps") {
        "p0" => ControlAxis::Momentum,
        "accel" => ControlAxis::Acceleration,
        _ => ControlAxis::Detuning,
    };
    let phi = kick_strength(cfg, p);
    let eng = engine(cfg)?;
    let points = required_count(cfg, "points");
    let ns = cfg.counts("n_list").expect("n_list has a default");
    let measured = ns
        .par_iter()
        .map(|&n| {
            let model = DeltaKickModel::new(p, n, phi, axis, eng)?;
            let m = measure_fwhm(&model, None, points)?;
            Ok((m.fwhm, model.predicted_fwhm()))
        })
        .collect::<Result<Vec<_>, rotor_interferometer::Error>>()?;
    let unit = axis.column().split_once('_').map_or("", |(_, u)| u);
    let mut table = Table::new([
        "n".to_string(),
        format!("fwhm_{unit}"),
        format!("predicted_fwhm_{unit}"),
    ]);
    let mut pts = Vec::new();
    for (&n, (w, pred)) in ns.iter().zip(&measured) {
        table.rows.push(vec![
            Cell::Int(n as i64),
            Cell::Real(*w),
            Cell::Real(pred.unwrap_or(f64::NAN)),
        ]);
        pts.push((n as f64, *w));
    }
    let mut m = Map::new();
    m.insert("axis".into(), json!(axis.name()));
    let fit = match fit_scaling(&pts, 1.0) {
        Ok(f) => {
            m.insert("spans_decade".into(), json!(true));
            f
        }
        Err(rotor_interferometer::Error::InsufficientData(_)) => {
            m.insert("spans_decade".into(), json!(false));
            fit_power_law(&pts, 1.0)?
        }
        Err(e) => return Err(e.into()),
    };
    m.insert("fit".into(), fit_json(&fit));
    if axis == ControlAxis::Detuning {
        let reference: Vec<(f64, f64)> = ns
            .iter()
            .map(|&n| (n as f64, analytic::fwhm_eps_asymptotic(n, phi, p)))
            .collect();
        m.insert("predicted_fit".into(), fit_json(&fit_power_law(&reference, 1.0)?));
    }
    Ok((table, m))
}

fn peak_shift(cfg: &RunConfig, p: &PhysicalParams) -> Result<Output, CliError> {
    let n = required_count(cfg, "n");
    let gamma = required_real(cfg, "gamma");
    let points = required_count(cfg, "points");
    let mut m = Map::new();
    let (tau, hint) = match cfg.real("tau_p_us") {
        Some(us) => {
            m.insert("tau_source".into(), json!("config"));
            (us * 1e-6, None)
        }
        None => {
            let options = TauSearchOptions {
                scan_points: points,
                ..TauSearchOptions::default()
            };
            let t = find_tau_min(p, n, gamma, &options)?;
            m.insert("tau_source".into(), json!("tau-min search"));
            m.insert("w_min_s".into(), json!(t.w_min));
            (t.tau_min, Some(t.w_min))
        }
    };
    m.insert("tau_p_s".into(), json!(tau));
    let multiples = cfg.counts("multiples").expect("multiples has a default");
    let shifts = multiples
        .par_iter()
        .map(|&l| measure_peak_shift(p, n, gamma, tau, l, hint))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(["multiple", "delta_eps_s", "peak_output", "fwhm_s"]);
    for (&l, s) in multiples.iter().zip(&shifts) {
        table.rows.push(vec![
            Cell::Int(l as i64),
            Cell::Real(s.delta_eps),
            Cell::Real(s.peak),
            Cell::Real(s.fwhm),
        ]);
    }
    let first = shifts[0].delta_eps;
    let spread = shifts
        .iter()
        .map(|s| (s.delta_eps - first).abs())
        .fold(0.0, f64::max);
    m.insert("delta_eps_s".into(), json!(shifts.iter().map(|s| s.delta_eps).collect::<Vec<_>>()));
    m.insert("max_relative_difference".into(), json!(spread / first.abs()));
    Ok((table, m))
}

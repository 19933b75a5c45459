//! Flat key-value run configuration.
//!
//! A config file holds one `key = value` pair per line; `#` starts a
//! comment. The JSON sidecar written next to every CSV is accepted in the
//! same place, in which case its `config` object supplies the pairs. Each
//! experiment kind declares which keys it takes and their defaults; anything
//! else is rejected before any computation starts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rotor_interferometer::units::RB85_MASS_U;
use serde_json::Value;

use crate::error::CliError;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Echo,
    MomentumHistory,
    ScanEps,
    ScanP0,
    ScanAccel,
    FiniteScan,
    TauMinSweep,
    FitScaling,
    PeakShift,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Echo,
        Kind::MomentumHistory,
        Kind::ScanEps,
        Kind::ScanP0,
        Kind::ScanAccel,
        Kind::FiniteScan,
        Kind::TauMinSweep,
        Kind::FitScaling,
        Kind::PeakShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Echo => "echo",
            Kind::MomentumHistory => "momentum-history",
            Kind::ScanEps => "scan-eps",
            Kind::ScanP0 => "scan-p0",
            Kind::ScanAccel => "scan-accel",
            Kind::FiniteScan => "finite-scan",
            Kind::TauMinSweep => "tau-min-sweep",
            Kind::FitScaling => "fit-scaling",
            Kind::PeakShift => "peak-shift",
        }
    }

    fn keys(self) -> &'static [Key] {
        use Kind::*;
        match self {
            Echo | MomentumHistory => &[N, PHI_D, GAMMA_OPT, TAU_OPT, EPS, P0, ACCEL],
            ScanEps | ScanP0 | ScanAccel => {
                &[N, PHI_D, GAMMA_OPT, TAU_OPT, ENGINE, SIGMA, POINTS, RANGE]
            }
            FiniteScan => &[N, GAMMA, TAU, MULTIPLE, P0, POINTS, RANGE],
            TauMinSweep => &[GAMMA, N_LIST, COARSE_POINTS, POINTS],
            FitScaling => &[AXIS, PHI_D, GAMMA_OPT, TAU_OPT, ENGINE, N_LIST_FIT, POINTS],
            PeakShift => &[N, GAMMA, TAU_OPT, MULTIPLES, POINTS],
        }
    }

    /// Whether φ_d may be given through (γ, τ_p) instead.
    fn kick_from_pulse(self) -> bool {
        !matches!(self, Kind::FiniteScan | Kind::TauMinSweep | Kind::PeakShift)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::validation(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug)]
enum Ty {
    Real { positive: bool },
    Count { min: u64 },
    Counts { min: u64 },
    Pair,
    Word(&'static [&'static str]),
}

#[derive(Clone, Copy, Debug)]
struct Key {
    name: &'static str,
    ty: Ty,
    default: Option<&'static str>,
    required: bool,
}

const fn key(name: &'static str, ty: Ty, default: Option<&'static str>, required: bool) -> Key {
    Key {
        name,
        ty,
        default,
        required,
    }
}

const REAL: Ty = Ty::Real { positive: false };
const POSITIVE: Ty = Ty::Real { positive: true };

const MASS: Key = key("mass_u", POSITIVE, None, false);
const LAMBDA: Key = key("lambda_nm", POSITIVE, Some("780"), false);
const PARALLEL: Key = key("parallel", Ty::Count { min: 1 }, None, false);
const N: Key = key("n", Ty::Count { min: 1 }, None, true);
const PHI_D: Key = key("phi_d", REAL, None, false);
const GAMMA: Key = key("gamma", POSITIVE, None, true);
const GAMMA_OPT: Key = key("gamma", POSITIVE, None, false);
const TAU: Key = key("tau_p_us", POSITIVE, None, true);
const TAU_OPT: Key = key("tau_p_us", POSITIVE, None, false);
const EPS: Key = key("eps_s", REAL, Some("0"), false);
const P0: Key = key("p0_hbar_kappa", REAL, Some("0"), false);
const ACCEL: Key = key("accel_m_s2", REAL, Some("0"), false);
const ENGINES: &[&str] = &["ladder", "first-order", "closed-form", "linearized"];
const ENGINE: Key = key("engine", Ty::Word(ENGINES), Some("ladder"), false);
const SIGMA: Key = key("sigma_um", POSITIVE, None, false);
const POINTS: Key = key("points", Ty::Count { min: 32 }, Some("64"), false);
const RANGE: Key = key("range", Ty::Pair, None, false);
const MULTIPLE: Key = key("multiple", Ty::Count { min: 1 }, Some("1"), false);
const MULTIPLES: Key = key("multiples", Ty::Counts { min: 1 }, Some("1,2"), false);
const N_LIST: Key = key("n_list", Ty::Counts { min: 1 }, Some("16,32,64,128"), false);
const N_LIST_FIT: Key = key("n_list", Ty::Counts { min: 1 }, Some("10,20,40,80,160"), false);
const COARSE_POINTS: Key = key("coarse_points", Ty::Count { min: 16 }, Some("32"), false);
const AXIS: Key = key("axis", Ty::Word(&["eps", "p0", "accel"]), Some("eps"), false);

/// Accepted spellings mapped to the canonical key.
fn canonical(name: &str) -> String {
    match name.trim() {
        "N" | "pulses" => "n".into(),
        "V0_over_hbar_kappa2" | "v0_over_hbar_kappa2" => "gamma".into(),
        other => other.to_string(),
    }
}

/// Unvalidated pairs in the order of precedence they were merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    pairs: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            Self::from_sidecar(text)
        } else {
            Self::from_key_values(text)
        }
    }

    fn from_key_values(text: &str) -> Result<Self, CliError> {
        let mut pairs = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::validation(format!("line {}: expected `key = value`", i + 1))
            })?;
            let k = canonical(k);
            if pairs.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::validation(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(Self { pairs })
    }

    fn from_sidecar(text: &str) -> Result<Self, CliError> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| CliError::validation(format!("config is not valid JSON: {e}")))?;
        if let Some(v) = doc.get("format_version") {
            match v.as_u64() {
                Some(n) if n <= FORMAT_VERSION => {}
                _ => {
                    return Err(CliError::validation(format!(
                        "unsupported sidecar format_version {v}"
                    )))
                }
            }
        }
        let obj = doc
            .get("config")
            .unwrap_or(&doc)
            .as_object()
            .ok_or_else(|| CliError::validation("sidecar `config` must be an object"))?;
        let mut pairs = BTreeMap::new();
        for (k, v) in obj {
            let text = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                _ => {
                    return Err(CliError::validation(format!(
                        "config value for `{k}` must be a string or number"
                    )))
                }
            };
            pairs.insert(canonical(k), text);
        }
        Ok(Self { pairs })
    }

    /// Sets a pair, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.pairs.insert(canonical(key), value.into());
    }

    /// Parses a `key=value` override.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("`{assignment}` is not key=value")))?;
        self.set(k, v.trim());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.get(key).map(String::as_str)
    }
}

/// A validated value.
#[derive(Clone, Debug, PartialEq)]
pub enum Val {
    Real(f64),
    Count(u64),
    Counts(Vec<u64>),
    Pair(f64, f64),
    Word(String),
}

impl Val {
    fn to_json(&self) -> Value {
        match self {
            Val::Real(x) => serde_json::json!(x),
            Val::Count(n) => serde_json::json!(n),
            Val::Counts(v) => Value::String(
                v.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
            ),
            Val::Pair(a, b) => Value::String(format!("{a:e},{b:e}")),
            Val::Word(w) => Value::String(w.clone()),
        }
    }
}

fn parse_real(name: &str, s: &str, positive: bool) -> Result<f64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("`{name}`: `{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::validation(format!("`{name}` must be finite")));
    }
    if positive && x <= 0.0 {
        return Err(CliError::validation(format!("`{name}` must be positive, got {x}")));
    }
    Ok(x)
}

fn parse_count(name: &str, s: &str, min: u64) -> Result<u64, CliError> {
    let n: u64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("`{name}`: `{s}` is not a whole number")))?;
    if n < min {
        return Err(CliError::validation(format!("`{name}` must be at least {min}, got {n}")));
    }
    Ok(n)
}

fn parse_value(k: &Key, s: &str) -> Result<Val, CliError> {
    Ok(match k.ty {
        Ty::Real { positive } => Val::Real(parse_real(k.name, s, positive)?),
        Ty::Count { min } => Val::Count(parse_count(k.name, s, min)?),
        Ty::Counts { min } => {
            let v = s
                .split(',')
                .map(|p| parse_count(k.name, p, min))
                .collect::<Result<Vec<_>, _>>()?;
            if v.is_empty() {
                return Err(CliError::validation(format!("`{}` is empty", k.name)));
            }
            Val::Counts(v)
        }
        Ty::Pair => {
            let (a, b) = s.split_once(',').ok_or_else(|| {
                CliError::validation(format!("`{}` must be `lo,hi`", k.name))
            })?;
            let (a, b) = (parse_real(k.name, a, false)?, parse_real(k.name, b, false)?);
            if a >= b {
                return Err(CliError::validation(format!(
                    "`{}`: lower end {a} is not below upper end {b}",
                    k.name
                )));
            }
            Val::Pair(a, b)
        }
        Ty::Word(options) => {
            let w = s.trim();
            if !options.contains(&w) {
                return Err(CliError::validation(format!(
                    "`{}` must be one of {}, got `{w}`",
                    k.name,
                    options.join(", ")
                )));
            }
            Val::Word(w.to_string())
        }
    })
}

/// Validated configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub kind: Kind,
    values: BTreeMap<&'static str, Val>,
}

impl RunConfig {
    pub fn resolve(kind: Kind, raw: &RawConfig) -> Result<Self, CliError> {
        if let Some(k) = raw.get("kind") {
            if k != kind.name() {
                return Err(CliError::validation(format!(
                    "config is for `{k}` but the `{kind}` subcommand was given"
                )));
            }
        }
        let default_mass = RB85_MASS_U.to_string();
        let mut keys: Vec<Key> = vec![MASS, LAMBDA, PARALLEL];
        keys.extend_from_slice(kind.keys());
        for name in raw.pairs.keys() {
            if name != "kind" && !keys.iter().any(|k| k.name == name.as_str()) {
                return Err(CliError::validation(format!(
                    "key `{name}` does not apply to `{kind}`"
                )));
            }
        }
        let mut values = BTreeMap::new();
        for k in &keys {
            let text = match (raw.get(k.name), k.default) {
                (Some(s), _) => Some(s.to_string()),
                (None, Some(d)) => Some(d.to_string()),
                (None, None) if k.name == "mass_u" => Some(default_mass.clone()),
                (None, None) if k.required => {
                    return Err(CliError::validation(format!(
                        "`{kind}` needs `{}`",
                        k.name
                    )))
                }
                (None, None) => None,
            };
            if let Some(text) = text {
                values.insert(k.name, parse_value(k, &text)?);
            }
        }
        let cfg = Self { kind, values };
        cfg.check_kick()?;
        Ok(cfg)
    }

    /// δ-kick kinds need φ_d either directly or through a pulse (γ, τ_p).
    fn check_kick(&self) -> Result<(), CliError> {
        if !self.kind.kick_from_pulse() {
            return Ok(());
        }
        let has = |k| self.values.contains_key(k);
        match (has("phi_d"), has("gamma"), has("tau_p_us")) {
            (true, false, false) | (false, true, true) => Ok(()),
            (true, _, _) => Err(CliError::validation(
                "give either `phi_d` or the pair `gamma`, `tau_p_us`, not both",
            )),
            _ => Err(CliError::validation(format!(
                "`{}` needs `phi_d` or both `gamma` and `tau_p_us`",
                self.kind
            ))),
        }
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.values.get(key)? {
            Val::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn count(&self, key: &str) -> Option<usize> {
        match self.values.get(key)? {
            Val::Count(n) => Some(*n as usize),
            _ => None,
        }
    }

    pub fn counts(&self, key: &str) -> Option<Vec<usize>> {
        match self.values.get(key)? {
            Val::Counts(v) => Some(v.iter().map(|&n| n as usize).collect()),
            _ => None,
        }
    }

    pub fn pair(&self, key: &str) -> Option<(f64, f64)> {
        match self.values.get(key)? {
            Val::Pair(a, b) => Some((*a, *b)),
            _ => None,
        }
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        match self.values.get(key)? {
            Val::Word(w) => Some(w),
            _ => None,
        }
    }

    /// Resolved configuration as written to the sidecar.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), Value::String(self.kind.name().into()));
        for (k, v) in &self.values {
            obj.insert((*k).into(), v.to_json());
        }
        Value::Object(obj)
    }
}

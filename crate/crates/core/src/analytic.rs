//! Closed-form and first-order predictions of the interferometer output for
//! δ-kicks.
//!
//! Near resonance the first-train amplitudes are `c_q = A_q e^{iθ_q}` and the
//! overlaps with the second train `d_q* = B_q e^{-iχ_q}`. To first order in a
//! single control (detuning ε, initial momentum p₀ or acceleration a) both
//! magnitudes stay `J_q(Nφ_d)` and the phases move linearly, so
//! `I = |Σ_q J_q² e^{i(θ'_q - χ'_q)x}|²`.
//!
//! Phase slopes follow the sign conventions of [`crate::ladder`]: a kick is
//! `exp(-iφ cos κx)`, free flight multiplies by `exp(-iE t/ħ)`, and under
//! acceleration the free-falling frame picks up `+iqκaT_T²(2n-1)/2` in
//! period n. The slopes are checked against finite differences of simulated
//! amplitudes in the tests.

use crate::bessel::{bessel_j0, bessel_j_orders, bessel_j_truncated, j0_squared_half_point};
use crate::error::{Error, Result};
use crate::units::PhysicalParams;

const SINGULAR_BESSEL: f64 = 1e-300;
const SUM_CUTOFF: f64 = 1e-16;

/// The single control displaced from resonance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Control {
    /// ε = T - T_T, s.
    Detuning(f64),
    /// Initial momentum p₀, kg·m/s.
    Momentum(f64),
    /// Acceleration a, m/s².
    Acceleration(f64),
}

impl Control {
    pub fn value(&self) -> f64 {
        match *self {
            Control::Detuning(x) | Control::Momentum(x) | Control::Acceleration(x) => x,
        }
    }
}

/// First-order description of ladder site q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstOrderCoeffs {
    pub q: i64,
    /// `J_q(Nφ_d)`, shared by `c_q` and `d_q*`.
    pub magnitude: f64,
    /// rad/s
    pub theta_slope_eps: f64,
    pub chi_slope_eps: f64,
    /// rad/(kg·m/s)
    pub theta_slope_p0: f64,
    pub chi_slope_p0: f64,
    /// rad/(m/s²)
    pub theta_slope_a: f64,
    pub chi_slope_a: f64,
}

/// `J_q(x)` for q in `-(n)..=n` out of a table of non-negative orders.
fn signed_order(table: &[f64], q: i64) -> f64 {
    let v = table[q.unsigned_abs() as usize];
    if q < 0 && q % 2 != 0 {
        -v
    } else {
        v
    }
}

fn eps_slopes_from(n: usize, phi_d: f64, q: i64, jq: f64, jq1: f64, params: &PhysicalParams) -> Result<(f64, f64)> {
    let x = n as f64 * phi_d;
    if jq.abs() < SINGULAR_BESSEL {
        return Err(Error::SingularCoefficient {
            q,
            argument: x,
            value: jq,
        });
    }
    let nf = n as f64;
    let qf = q as f64;
    let rate = params.phase_rate();
    let common = (nf - 1.0 / nf) * qf / 6.0 - phi_d * (nf * nf - 1.0) * (jq1 / jq) / 6.0;
    let theta = rate * (common - (nf / 3.0 + 0.5 + 1.0 / (6.0 * nf)) * qf * qf);
    let chi = -rate * (common - (nf / 3.0 - 0.5 + 1.0 / (6.0 * nf)) * qf * qf);
    Ok((theta, chi))
}

/// `(∂θ_q/∂ε, ∂χ_q/∂ε)` at resonance, rad/s.
pub fn eps_phase_slopes(n: usize, phi_d: f64, q: i64, params: &PhysicalParams) -> Result<(f64, f64)> {
    let x = n as f64 * phi_d;
    let table = bessel_j_orders(x, q.unsigned_abs() as usize + 1);
    eps_slopes_from(n, phi_d, q, signed_order(&table, q), signed_order(&table, q - 1), params)
}

/// `(∂θ_q/∂p₀, ∂χ_q/∂p₀)` at p₀ = 0, rad per kg·m/s.
///
/// Both trains accumulate the same sign of momentum-linear phase along the
/// way out and back, so the χ slope carries the opposite sign to θ.
pub fn p0_phase_slopes(n: usize, q: i64, params: &PhysicalParams) -> (f64, f64) {
    let c = params.talbot_time * params.kappa / (2.0 * params.mass) * q as f64;
    let nf = n as f64;
    (-c * (nf + 1.0), c * (nf - 1.0))
}

/// `(∂θ_q/∂a, ∂χ_q/∂a)` at a = 0, rad per m/s².
pub fn accel_phase_slopes(n: usize, q: i64, params: &PhysicalParams) -> (f64, f64) {
    let tt = params.talbot_time;
    let c = tt * tt * params.kappa / 12.0 * q as f64;
    let nf = n as f64;
    (c * (nf + 1.0) * (4.0 * nf - 1.0), -c * (nf - 1.0) * (8.0 * nf - 1.0))
}

pub fn first_order_coeffs(n: usize, phi_d: f64, q: i64, params: &PhysicalParams) -> Result<FirstOrderCoeffs> {
    let x = n as f64 * phi_d;
    let table = bessel_j_orders(x, q.unsigned_abs() as usize + 1);
    let jq = signed_order(&table, q);
    let (theta_slope_eps, chi_slope_eps) =
        eps_slopes_from(n, phi_d, q, jq, signed_order(&table, q - 1), params)?;
    let (theta_slope_p0, chi_slope_p0) = p0_phase_slopes(n, q, params);
    let (theta_slope_a, chi_slope_a) = accel_phase_slopes(n, q, params);
    Ok(FirstOrderCoeffs {
        q,
        magnitude: jq,
        theta_slope_eps,
        chi_slope_eps,
        theta_slope_p0,
        chi_slope_p0,
        theta_slope_a,
        chi_slope_a,
    })
}

/// `|Σ_q d_q* c_q|²` with first-order coefficients.
pub fn output_first_order(n: usize, phi_d: f64, control: Control, params: &PhysicalParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("at least one pulse per train is required"));
    }
    let x = n as f64 * phi_d;
    let mut table = bessel_j_truncated(x, SUM_CUTOFF);
    let qmax = table.len() as i64 - 1;
    // one extra order for the J_{q-1}/J_q ratio at q = -qmax
    table.push(bessel_j_orders(x, qmax as usize + 1)[qmax as usize + 1]);
    let (mut re, mut im) = (0.0, 0.0);
    for q in -qmax..=qmax {
        let jq = signed_order(&table, q);
        let dphase = match control {
            Control::Detuning(eps) => {
                let (t, c) = eps_slopes_from(n, phi_d, q, jq, signed_order(&table, q - 1), params)?;
                (t - c) * eps
            }
            Control::Momentum(p0) => {
                let (t, c) = p0_phase_slopes(n, q, params);
                (t - c) * p0
            }
            Control::Acceleration(a) => {
                let (t, c) = accel_phase_slopes(n, q, params);
                (t - c) * a
            }
        };
        let w = jq * jq;
        re += w * dphase.cos();
        im += w * dphase.sin();
    }
    Ok(re * re + im * im)
}

/// Large-N line shape in ε: `J₀²(N³φ_d² ħκ²ε/(6m))`.
pub fn i_eps_asymptotic(n: usize, phi_d: f64, eps: f64, params: &PhysicalParams) -> f64 {
    let nf = n as f64;
    let arg = nf.powi(3) * phi_d * phi_d * params.phase_rate() / 3.0 * eps;
    bessel_j0(arg).powi(2)
}

fn graf_output(n: usize, phi_d: f64, angle: f64) -> f64 {
    let arg = n as f64 * phi_d * (2.0 - 2.0 * angle.cos()).max(0.0).sqrt();
    bessel_j0(arg).powi(2)
}

fn p0_angle(n: usize, p0: f64, params: &PhysicalParams) -> f64 {
    n as f64 * params.kappa * params.talbot_time * p0 / params.mass
}

fn accel_angle(n: usize, a: f64, params: &PhysicalParams) -> f64 {
    let nf = n as f64;
    let tt = params.talbot_time;
    nf * (2.0 * nf - 1.0) * params.kappa * tt * tt * a / 2.0
}

/// `J₀²(Nφ_d √(2 - 2cos(Nκ T_T p₀/m)))`.
pub fn i_p0_closed(n: usize, phi_d: f64, p0: f64, params: &PhysicalParams) -> f64 {
    graf_output(n, phi_d, p0_angle(n, p0, params))
}

/// `J₀²(N²φ_d κ T_T p₀/m)`.
pub fn i_p0_linearized(n: usize, phi_d: f64, p0: f64, params: &PhysicalParams) -> f64 {
    bessel_j0(phi_d * n as f64 * p0_angle(n, p0, params)).powi(2)
}

/// `J₀²(Nφ_d √(2 - 2cos(N(2N-1) κ T_T² a/2)))`.
pub fn i_accel_closed(n: usize, phi_d: f64, a: f64, params: &PhysicalParams) -> f64 {
    graf_output(n, phi_d, accel_angle(n, a, params))
}

/// `J₀²(N²(2N-1) φ_d a T_T² κ/2)`.
pub fn i_accel_linearized(n: usize, phi_d: f64, a: f64, params: &PhysicalParams) -> f64 {
    bessel_j0(phi_d * n as f64 * accel_angle(n, a, params)).powi(2)
}

/// FWHM in ε of [`i_eps_asymptotic`], s.
pub fn fwhm_eps_asymptotic(n: usize, phi_d: f64, params: &PhysicalParams) -> f64 {
    let nf = n as f64;
    2.0 * j0_squared_half_point() / (nf.powi(3) * phi_d * phi_d * params.phase_rate() / 3.0)
}

/// Half-max angle of the Graf line shape, if the peak drops below one half.
fn graf_half_angle(n: usize, phi_d: f64) -> Option<f64> {
    let s = j0_squared_half_point() / (2.0 * n as f64 * phi_d.abs());
    (s <= 1.0).then(|| 2.0 * s.asin())
}

/// FWHM in p₀ of [`i_p0_closed`], kg·m/s.
pub fn fwhm_p0_closed(n: usize, phi_d: f64, params: &PhysicalParams) -> Option<f64> {
    graf_half_angle(n, phi_d).map(|h| 2.0 * h / p0_angle(n, 1.0, params))
}

pub fn fwhm_p0_linearized(n: usize, phi_d: f64, params: &PhysicalParams) -> f64 {
    2.0 * j0_squared_half_point() / (n as f64 * phi_d.abs() * p0_angle(n, 1.0, params))
}

/// FWHM in a of [`i_accel_closed`], m/s².
pub fn fwhm_accel_closed(n: usize, phi_d: f64, params: &PhysicalParams) -> Option<f64> {
    graf_half_angle(n, phi_d).map(|h| 2.0 * h / accel_angle(n, 1.0, params))
}

pub fn fwhm_accel_linearized(n: usize, phi_d: f64, params: &PhysicalParams) -> f64 {
    2.0 * j0_squared_half_point() / (n as f64 * phi_d.abs() * accel_angle(n, 1.0, params))
}

//! Position-grid propagation with Fourier split-step, used as an independent
//! check of the ladder engines.
//!
//! A fiber β is represented by the lattice-periodic part `u(x)` of a Bloch
//! wave on one lattice period, sampled at `points` positions. Momentum
//! amplitudes sit in FFT order: index k holds site `q = k` for `k < G/2` and
//! `q = k - G` above. The potential acts pointwise on `u`, the kinetic term
//! diagonally on the momentum amplitudes.
//!
//! [`WideGrid`] instead spans many lattice periods and carries a localized
//! wavepacket, so every quasimomentum in the packet is evolved at once.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::ladder::{free_phase, KickSign, LadderState};
use crate::units::{PhysicalParams, HBAR};

/// Population allowed in the outer eighth of momentum space on each side.
pub const GRID_EDGE_LIMIT: f64 = 1e-8;
/// Allowed drift of the norm over a run.
pub const GRID_NORM_DRIFT: f64 = 1e-8;
const MAX_GRID_SUBSTEPS: usize = 1 << 14;

// Fourth-order triple-jump weights.
fn yoshida_weights() -> (f64, f64) {
    let c = 2f64.cbrt();
    let w1 = 1.0 / (2.0 - c);
    (w1, -c * w1)
}

struct Transforms {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transforms {
    fn new(points: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }
}

impl Clone for Transforms {
    fn clone(&self) -> Self {
        Self {
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
        }
    }
}

fn site_of(k: usize, points: usize) -> i64 {
    if k < points / 2 {
        k as i64
    } else {
        k as i64 - points as i64
    }
}

/// A quasimomentum fiber on a one-period position grid.
#[derive(Clone)]
pub struct GridFiber {
    beta: f64,
    /// Momentum amplitudes in FFT order.
    psi: Vec<Complex64>,
    cos_x: Vec<f64>,
    fft: Transforms,
}

impl GridFiber {
    pub fn from_ladder(state: &LadderState, points: usize) -> Result<Self> {
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::GridResolution(format!(
                "grid needs a power-of-two point count of at least 8, got {points}"
            )));
        }
        let half = (points / 2) as i64;
        if state.q_min() < -half || state.q_max() >= half {
            return Err(Error::GridResolution(format!(
                "ladder {}..={} does not fit on {points} points",
                state.q_min(),
                state.q_max()
            )));
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); points];
        for (q, c) in state.sites().zip(state.amplitudes()) {
            psi[q.rem_euclid(points as i64) as usize] = *c;
        }
        let cos_x = (0..points).map(|j| (TAU * j as f64 / points as f64).cos()).collect();
        Ok(Self {
            beta: state.beta(),
            psi,
            cos_x,
            fft: Transforms::new(points),
        })
    }

    pub fn points(&self) -> usize {
        self.psi.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Amplitudes on sites `q_min..=q_max` as a ladder state.
    pub fn to_ladder(&self, q_min: i64, q_max: i64) -> LadderState {
        let g = self.points() as i64;
        let amps = (q_min..=q_max)
            .map(|q| {
                if q < -g / 2 || q >= g / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.psi[q.rem_euclid(g) as usize]
                }
            })
            .collect();
        LadderState::from_amplitudes(self.beta, q_min, amps)
    }

    /// Mean of `(q+β)²`, i.e. the kinetic energy in units of `(ħκ)²/(2m)`.
    pub fn mean_square_momentum(&self) -> f64 {
        let g = self.points();
        let norm = self.norm_sqr();
        self.psi
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let qb = site_of(k, g) as f64 + self.beta;
                c.norm_sqr() * qb * qb
            })
            .sum::<f64>()
            / norm
    }

    /// Population in the outer eighth of momentum space on both sides.
    pub fn edge_population(&self) -> f64 {
        let g = self.points() as i64;
        let guard = 3 * g / 8;
        self.psi
            .iter()
            .enumerate()
            .filter(|(k, _)| site_of(*k, g as usize).abs() >= guard)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    fn check(&self, initial_norm: f64) -> Result<()> {
        let drift = (self.norm_sqr() - initial_norm).abs();
        let edge = self.edge_population();
        if drift > GRID_NORM_DRIFT || edge > GRID_EDGE_LIMIT {
            return Err(Error::GridResolution(format!(
                "norm drift {drift:.2e}, edge population {edge:.2e} on {} points",
                self.points()
            )));
        }
        Ok(())
    }

    /// Free flight for `x` Talbot times.
    pub fn kinetic(&mut self, x: f64) {
        let g = self.points();
        for (k, c) in self.psi.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -free_phase(x, site_of(k, g), self.beta));
        }
    }

    /// `exp(∓iφ cos κx)` applied pointwise.
    pub fn kick(&mut self, phi: f64, sign: KickSign) {
        let g = self.points() as f64;
        self.fft.inverse.process(&mut self.psi);
        let s = sign.value();
        for (c, cx) in self.psi.iter_mut().zip(&self.cos_x) {
            *c *= Complex64::from_polar(1.0 / g, -s * phi * cx);
        }
        self.fft.forward.process(&mut self.psi);
    }

    fn strang_step(&mut self, h: f64, gamma: f64, sign: KickSign) {
        self.kinetic(0.5 * h);
        self.kick(TAU * gamma * h, sign);
        self.kinetic(0.5 * h);
    }

    /// One pulse of strength γ lasting `x` Talbot times, `substeps`
    /// fourth-order steps.
    pub fn pulse_fixed(&mut self, gamma: f64, x: f64, sign: KickSign, substeps: usize) {
        let (w1, w0) = yoshida_weights();
        let h = x / substeps as f64;
        for _ in 0..substeps {
            self.strang_step(w1 * h, gamma, sign);
            self.strang_step(w0 * h, gamma, sign);
            self.strang_step(w1 * h, gamma, sign);
        }
    }

    /// Pulse with the step count doubled until successive results differ by
    /// less than `tol`. Returns the step count used.
    pub fn pulse(&mut self, gamma: f64, x: f64, sign: KickSign, tol: f64) -> Result<usize> {
        let start = self.clone();
        let mut m = 2;
        let mut prev = start.clone();
        prev.pulse_fixed(gamma, x, sign, m);
        let mut change = f64::INFINITY;
        while m < MAX_GRID_SUBSTEPS {
            m *= 2;
            let mut next = start.clone();
            next.pulse_fixed(gamma, x, sign, m);
            change = next
                .psi
                .iter()
                .zip(&prev.psi)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if change < tol {
                *self = next;
                return Ok(m);
            }
            prev = next;
        }
        Err(Error::NonConvergence {
            what: "grid split-step",
            detail: format!("change {change:.3e} after {MAX_GRID_SUBSTEPS} steps"),
        })
    }
}

/// Kick strength γ of a pulse, and its duration in Talbot times.
fn pulse_parameters(depth: f64, duration: f64, params: &PhysicalParams) -> (f64, f64) {
    (params.gamma_from_depth(depth), duration / params.talbot_time)
}

/// Finite-pulse sequence on a one-period grid: the oracle for
/// [`crate::pulse::run_finite_askrs`]. Returns the final momentum amplitudes
/// on `-half_width..=half_width`.
pub fn grid_finite_askrs(
    spec: &crate::pulse::FinitePulseSpec,
    beta: f64,
    params: &PhysicalParams,
    points: usize,
    half_width: usize,
) -> Result<LadderState> {
    let (gamma, x) = pulse_parameters(spec.depth, spec.duration, params);
    let free = spec.free_time() / params.talbot_time;
    let mut fiber = GridFiber::from_ladder(&LadderState::zero_momentum(beta, 0), points)?;
    for sign in [KickSign::Forward, KickSign::Reversed] {
        for _ in 0..spec.pulses {
            fiber.pulse(gamma, x, sign, 1e-11)?;
            fiber.kinetic(free);
            fiber.check(1.0)?;
        }
    }
    let hw = half_width as i64;
    Ok(fiber.to_ladder(-hw, hw))
}

/// Mean kinetic energy (J) after a single pulse on `|q = 0⟩` of fiber β.
pub fn single_pulse_energy(
    depth: f64,
    duration: f64,
    beta: f64,
    params: &PhysicalParams,
    points: usize,
) -> Result<f64> {
    let (gamma, x) = pulse_parameters(depth, duration, params);
    let mut fiber = GridFiber::from_ladder(&LadderState::zero_momentum(beta, 0), points)?;
    fiber.pulse(gamma, x, KickSign::Forward, 1e-10)?;
    fiber.check(1.0)?;
    let recoil = params.recoil_momentum();
    Ok(fiber.mean_square_momentum() * recoil * recoil / (2.0 * params.mass))
}

/// Many lattice periods carrying a Gaussian wavepacket.
pub struct WideGrid {
    periods: usize,
    /// Momentum amplitudes in FFT order; index k is wavenumber `k/periods`
    /// in units of κ.
    psi: Vec<Complex64>,
    cos_x: Vec<f64>,
    fft: Transforms,
}

impl WideGrid {
    /// Minimum-uncertainty packet of position width `sigma` (m) centred in
    /// a box of `periods` lattice periods with `per_period` points each.
    pub fn gaussian(
        sigma: f64,
        periods: usize,
        per_period: usize,
        params: &PhysicalParams,
    ) -> Result<Self> {
        let points = periods * per_period;
        if !points.is_power_of_two() || per_period < 8 {
            return Err(Error::GridResolution(format!(
                "wide grid needs a power-of-two total and ≥ 8 points per period, got {periods}×{per_period}"
            )));
        }
        let sx = params.kappa * sigma;
        let length = TAU * periods as f64;
        if 16.0 * sx > length {
            return Err(Error::GridResolution(format!(
                "box of {periods} periods is narrower than ±8σ"
            )));
        }
        let dx = length / points as f64;
        let centre = 0.5 * length;
        let mut psi: Vec<Complex64> = (0..points)
            .map(|j| {
                let x = j as f64 * dx - centre;
                Complex64::new((-x * x / (4.0 * sx * sx)).exp(), 0.0)
            })
            .collect();
        let fft = Transforms::new(points);
        fft.forward.process(&mut psi);
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|c| *c /= norm);
        let cos_x = (0..points).map(|j| (j as f64 * dx).cos()).collect();
        Ok(Self {
            periods,
            psi,
            cos_x,
            fft,
        })
    }

    fn wavenumber(&self, k: usize) -> f64 {
        site_of(k, self.psi.len()) as f64 / self.periods as f64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn momentum_density(&self) -> Vec<(f64, f64)> {
        (0..self.psi.len())
            .map(|k| (self.wavenumber(k), self.psi[k].norm_sqr()))
            .collect()
    }

    pub fn kinetic(&mut self, x: f64) {
        for k in 0..self.psi.len() {
            let p = self.wavenumber(k);
            let q = p.floor();
            let phase = free_phase(x, q as i64, p - q);
            self.psi[k] *= Complex64::from_polar(1.0, -phase);
        }
    }

    pub fn kick(&mut self, phi: f64, sign: KickSign) {
        let g = self.psi.len() as f64;
        self.fft.inverse.process(&mut self.psi);
        let s = sign.value();
        for (c, cx) in self.psi.iter_mut().zip(&self.cos_x) {
            *c *= Complex64::from_polar(1.0 / g, -s * phi * cx);
        }
        self.fft.forward.process(&mut self.psi);
    }

    fn strang_step(&mut self, h: f64, gamma: f64, sign: KickSign) {
        self.kinetic(0.5 * h);
        self.kick(TAU * gamma * h, sign);
        self.kinetic(0.5 * h);
    }

    fn pulse_fixed(&mut self, gamma: f64, x: f64, sign: KickSign, substeps: usize) {
        let (w1, w0) = yoshida_weights();
        let h = x / substeps as f64;
        for _ in 0..substeps {
            self.strang_step(w1 * h, gamma, sign);
            self.strang_step(w0 * h, gamma, sign);
            self.strang_step(w1 * h, gamma, sign);
        }
    }

    /// Population with |momentum| below ħκ/2: for every fiber in the packet
    /// this is the weight of its `q = 0` site.
    pub fn central_zone_population(&self) -> f64 {
        (0..self.psi.len())
            .map(|k| {
                let p = self.wavenumber(k).abs();
                if p < 0.5 {
                    self.psi[k].norm_sqr()
                } else if p == 0.5 {
                    0.5 * self.psi[k].norm_sqr()
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Finite-pulse sequence on a wide grid with a Gaussian input. `substeps`
/// fourth-order steps per pulse.
pub fn wide_grid_finite_output(
    spec: &crate::pulse::FinitePulseSpec,
    sigma: f64,
    params: &PhysicalParams,
    periods: usize,
    per_period: usize,
    substeps: usize,
) -> Result<f64> {
    let (gamma, x) = pulse_parameters(spec.depth, spec.duration, params);
    let free = spec.free_time() / params.talbot_time;
    let mut grid = WideGrid::gaussian(sigma, periods, per_period, params)?;
    for sign in [KickSign::Forward, KickSign::Reversed] {
        for _ in 0..spec.pulses {
            grid.pulse_fixed(gamma, x, sign, substeps);
            grid.kinetic(free);
        }
    }
    let drift = (grid.norm_sqr() - 1.0).abs();
    if drift > GRID_NORM_DRIFT {
        return Err(Error::GridResolution(format!("norm drift {drift:.2e}")));
    }
    Ok(grid.central_zone_population())
}

/// Potential depth whose δ-kick equivalent over `duration` is `phi`.
pub fn depth_for_phi(phi: f64, duration: f64) -> f64 {
    2.0 * HBAR * phi / duration
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{apply_kick, fiber_quadrature};
    use crate::pulse::{FinitePulseSpec, FiniteSequence};

    fn params() -> PhysicalParams {
        PhysicalParams::rubidium85()
    }

    #[test]
    fn grid_kick_matches_ladder_kick() {
        for &(phi, beta) in &[(0.5, 0.0), (1.0, 0.3), (2.5, -0.41)] {
            let s0 = LadderState::zero_momentum(beta, 30);
            let mut g = GridFiber::from_ladder(&s0, 2048).unwrap();
            g.kick(phi, KickSign::Reversed);
            let ladder = apply_kick(&s0, phi, KickSign::Reversed).unwrap();
            let grid = g.to_ladder(-30, 30);
            for q in -30..=30 {
                assert!((grid.amplitude(q) - ladder.amplitude(q)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn grid_free_flight_matches_ladder() {
        let p = params();
        let s0 = apply_kick(&LadderState::zero_momentum(0.2, 20), 1.2, KickSign::Forward).unwrap();
        let mut g = GridFiber::from_ladder(&s0, 64).unwrap();
        g.kinetic(1.37);
        let want = crate::ladder::apply_free_evolution(&s0, 1.37 * p.talbot_time, &p);
        assert!(g.to_ladder(-20, 20).distance(&want) < 1e-12);
    }

    #[test]
    fn grid_pulse_matches_exact_propagator() {
        let p = params();
        let v0 = p.depth_from_gamma(10.0);
        let tau = 5e-6;
        let s0 = LadderState::zero_momentum(0.0, 30);
        let exact = crate::pulse::PulsePropagator::new(0.0, -30, 61, v0, tau, KickSign::Forward, &p)
            .apply(&s0)
            .unwrap();
        let mut g = GridFiber::from_ladder(&s0, 256).unwrap();
        g.pulse(10.0, tau / p.talbot_time, KickSign::Forward, 1e-11).unwrap();
        let grid = g.to_ladder(-30, 30);
        for q in -30..=30 {
            assert!((grid.amplitude(q) - exact.amplitude(q)).norm() < 1e-6, "q = {q}");
        }
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let s0 = LadderState::zero_momentum(0.0, 40);
        assert!(matches!(GridFiber::from_ladder(&s0, 64), Err(Error::GridResolution(_))));
        assert!(matches!(GridFiber::from_ladder(&s0, 100), Err(Error::GridResolution(_))));
        // a strong pulse on a coarse grid fills the guard band
        let p = params();
        let spec = FinitePulseSpec::from_gamma(&p, 4, 40.0, 6e-6, p.talbot_time).unwrap();
        assert!(matches!(
            grid_finite_askrs(&spec, 0.0, &p, 16, 4),
            Err(Error::GridResolution(_))
        ));
    }

    #[test]
    fn single_pulse_energy_is_bounded_by_depth() {
        let p = params();
        for &(gamma, tau) in &[(1.0, 5e-6), (10.0, 5e-6), (10.0, 20e-6), (50.0, 3e-6)] {
            let v0 = p.depth_from_gamma(gamma);
            let e = single_pulse_energy(v0, tau, 0.0, &p, 256).unwrap();
            assert!(e > 0.0 && e <= v0, "γ = {gamma}, τ = {tau:e}: {e:e} vs {v0:e}");
        }
    }

    #[test]
    fn free_wavepacket_keeps_its_momentum_density() {
        let p = params();
        let mut w = WideGrid::gaussian(1e-6, 64, 16, &p).unwrap();
        let before = w.momentum_density();
        w.kinetic(3.3);
        let after = w.momentum_density();
        for (a, b) in before.iter().zip(&after) {
            assert!((a.1 - b.1).abs() < 1e-14);
        }
        assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wide_grid_matches_fiber_quadrature() {
        let p = params();
        let sigma = 1.5e-6;
        let gamma = 5.0;
        let tau = 2e-6;
        let v0 = p.depth_from_gamma(gamma);
        let period = p.talbot_time + 2e-7;
        let spec = FinitePulseSpec::new(2, v0, tau, period).unwrap();
        let grid = wide_grid_finite_output(&spec, sigma, &p, 128, 32, 64).unwrap();
        let width = 1.0 / (2.0 * sigma * p.kappa);
        let quad = fiber_quadrature(width, 0.05, 1e-6, |beta| {
            FiniteSequence::new(&p, 2, v0, tau, beta)?.output(period)
        })
        .unwrap();
        assert!((grid - quad.output).abs() < 1e-4 * quad.output, "{grid} vs {}", quad.output);
    }
}

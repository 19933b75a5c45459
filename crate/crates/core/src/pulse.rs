//! Square pulses of finite duration.
//!
//! During a pulse the fiber Hamiltonian is tridiagonal in q. Measured in
//! radians per Talbot time it has diagonal `2π(q+β)²` and off-diagonal
//! `±πγ`, since `V₀/(4ħ) = πγ/T_T`. Two propagators are provided:
//!
//! * [`apply_finite_pulse`], a symmetric kinetic/kick splitting with the
//!   sub-step count doubled until the result settles;
//! * [`PulsePropagator`], the exact exponential from an eigendecomposition of
//!   the truncated Hamiltonian, stored as a band. Sequences and scans use this.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{
    auto_half_width, free_evolution_factors, free_phase, AskrsOutcome, KickOperator, KickSign,
    LadderState,
};
use crate::units::{PhysicalParams, HBAR};

/// Sub-step refinement stops once successive states differ by less than this.
pub const SPLITTING_TOLERANCE: f64 = 1e-9;
/// Largest sub-step count tried by [`apply_finite_pulse`].
pub const MAX_SUBSTEPS: usize = 1 << 16;
/// Propagator entries below this magnitude are outside the stored band.
const BAND_CUTOFF: f64 = 1e-15;
const MAX_WIDENINGS: usize = 8;

/// N square pulses per train of depth V₀ and duration τ_p, each followed by
/// free flight for `period - duration`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinitePulseSpec {
    pub pulses: usize,
    /// V₀, J.
    pub depth: f64,
    /// τ_p, s.
    pub duration: f64,
    /// T, s.
    pub period: f64,
}

impl FinitePulseSpec {
    pub fn new(pulses: usize, depth: f64, duration: f64, period: f64) -> Result<Self> {
        if pulses == 0 {
            return Err(Error::invalid("at least one pulse per train is required"));
        }
        if !(depth >= 0.0 && depth.is_finite()) {
            return Err(Error::invalid(format!("potential depth must be non-negative, got {depth}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid(format!("period must be positive, got {period}")));
        }
        if !(duration >= 0.0 && duration <= period) {
            return Err(Error::invalid(format!(
                "pulse duration must lie in [0, T] = [0, {period:e}] s, got {duration:e}"
            )));
        }
        Ok(Self {
            pulses,
            depth,
            duration,
            period,
        })
    }

    pub fn from_gamma(
        params: &PhysicalParams,
        pulses: usize,
        gamma: f64,
        duration: f64,
        period: f64,
    ) -> Result<Self> {
        Self::new(pulses, params.depth_from_gamma(gamma), duration, period)
    }

    /// δ-kick equivalent V₀τ_p/(2ħ).
    pub fn phi_d(&self) -> f64 {
        self.depth * self.duration / (2.0 * HBAR)
    }

    pub fn gamma(&self, params: &PhysicalParams) -> f64 {
        params.gamma_from_depth(self.depth)
    }

    pub fn free_time(&self) -> f64 {
        self.period - self.duration
    }

    pub fn half_width(&self) -> usize {
        auto_half_width(self.pulses, self.phi_d())
    }
}

/// Nearest-neighbour coupling of the pulse Hamiltonian, rad per T_T.
fn coupling(depth: f64, params: &PhysicalParams) -> f64 {
    depth * params.talbot_time / (4.0 * HBAR)
}

/// One pulse of `substeps` symmetric steps `K(h/2) kick(φ/M) K(h/2)`.
pub fn strang_pulse(
    state: &LadderState,
    depth: f64,
    duration: f64,
    sign: KickSign,
    params: &PhysicalParams,
    substeps: usize,
) -> LadderState {
    let m = substeps.max(1);
    let phi = depth * duration / (2.0 * HBAR);
    let kick = KickOperator::new(phi / m as f64, sign);
    let h = duration / params.talbot_time / m as f64;
    let half: Vec<Complex64> = state
        .sites()
        .map(|q| Complex64::from_polar(1.0, -free_phase(0.5 * h, q, state.beta())))
        .collect();
    let full: Vec<Complex64> = half.iter().map(|c| c * c).collect();

    let mut cur = state.amplitudes().to_vec();
    let mut scratch = cur.clone();
    cur.iter_mut().zip(&half).for_each(|(c, f)| *c *= f);
    for step in 0..m {
        kick.apply_into(&cur, &mut scratch);
        std::mem::swap(&mut cur, &mut scratch);
        let f = if step + 1 == m { &half } else { &full };
        cur.iter_mut().zip(f).for_each(|(c, f)| *c *= f);
    }
    LadderState::from_amplitudes(state.beta(), state.q_min(), cur)
}

/// Result of the adaptive splitting.
#[derive(Clone, Debug)]
pub struct SplitPulse {
    pub state: LadderState,
    pub substeps: usize,
    /// Distance between the last two refinements.
    pub change: f64,
}

/// `exp(-i(p²/2m ± (V₀/2)cos κx)τ_p/ħ)` on the fiber by symmetric splitting,
/// doubling the sub-step count until successive results differ by less
/// than [`SPLITTING_TOLERANCE`].
pub fn apply_finite_pulse(
    state: &LadderState,
    depth: f64,
    duration: f64,
    sign: KickSign,
    params: &PhysicalParams,
) -> Result<SplitPulse> {
    let mut m = 4;
    let mut prev = strang_pulse(state, depth, duration, sign, params, m);
    let mut change = f64::INFINITY;
    while m < MAX_SUBSTEPS {
        m *= 2;
        let next = strang_pulse(state, depth, duration, sign, params, m);
        change = next.distance(&prev);
        if change < SPLITTING_TOLERANCE {
            next.check_truncation()?;
            return Ok(SplitPulse {
                state: next,
                substeps: m,
                change,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        what: "pulse splitting",
        detail: format!("change {change:.3e} after {MAX_SUBSTEPS} sub-steps"),
    })
}

/// Eigendecomposition of the pulse Hamiltonian on a fixed ladder. The
/// Hamiltonian does not depend on τ_p, so one decomposition serves every
/// pulse duration.
#[derive(Clone, Debug)]
pub struct PulseEigenbasis {
    beta: f64,
    q_min: i64,
    len: usize,
    /// Eigenvalues, rad per T_T.
    values: Vec<f64>,
    /// Row-major eigenvectors: `rows[i * len + m]` is component i of vector m.
    rows: Vec<f64>,
}

impl PulseEigenbasis {
    /// Forward-sign Hamiltonian `2π(q+β)²` on the diagonal, `πγ` beside it.
    pub fn new(beta: f64, q_min: i64, len: usize, depth: f64, params: &PhysicalParams) -> Self {
        let g = coupling(depth, params);
        let h = DMatrix::from_fn(len, len, |i, j| {
            if i == j {
                let qb = (q_min + i as i64) as f64 + beta;
                TAU * qb * qb
            } else if i.abs_diff(j) == 1 {
                g
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(h);
        let mut rows = vec![0.0; len * len];
        for m in 0..len {
            for i in 0..len {
                rows[i * len + m] = eig.eigenvectors[(i, m)];
            }
        }
        Self {
            beta,
            q_min,
            len,
            values: eig.eigenvalues.iter().copied().collect(),
            rows,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Banded `exp(-iHτ_p/ħ)` for the forward sign.
    pub fn propagator(&self, duration: f64, params: &PhysicalParams) -> PulsePropagator {
        let s = duration / params.talbot_time;
        let n = self.len;
        let phase: Vec<Complex64> = self
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -s * l))
            .collect();
        let mut diags: Vec<Vec<Complex64>> = Vec::new();
        let mut quiet = 0;
        for d in 0..n {
            let mut band = vec![Complex64::new(0.0, 0.0); n];
            let mut largest: f64 = 0.0;
            for i in 0..n - d {
                let a = &self.rows[i * n..(i + 1) * n];
                let b = &self.rows[(i + d) * n..(i + d + 1) * n];
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    acc += phase[m] * (a[m] * b[m]);
                }
                band[i] = acc;
                largest = largest.max(acc.norm());
            }
            diags.push(band);
            if largest < BAND_CUTOFF {
                quiet += 1;
                if quiet == 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        diags.truncate(diags.len() - quiet);
        PulsePropagator {
            beta: self.beta,
            q_min: self.q_min,
            len: n,
            upper: diags,
        }
    }
}

/// Complex-symmetric banded pulse propagator on a fixed ladder.
#[derive(Clone, Debug)]
pub struct PulsePropagator {
    beta: f64,
    q_min: i64,
    len: usize,
    /// `upper[d][i] = U[i][i+d]`; the lower half follows by symmetry.
    upper: Vec<Vec<Complex64>>,
}

impl PulsePropagator {
    pub fn new(
        beta: f64,
        q_min: i64,
        len: usize,
        depth: f64,
        duration: f64,
        sign: KickSign,
        params: &PhysicalParams,
    ) -> Self {
        let p = PulseEigenbasis::new(beta, q_min, len, depth, params).propagator(duration, params);
        match sign {
            KickSign::Forward => p,
            KickSign::Reversed => p.reversed(),
        }
    }

    /// The π-shifted pulse. With `S = diag((-1)^q)` the reversed Hamiltonian
    /// is `S H S`, so the off-diagonal bands alternate sign.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for (d, band) in out.upper.iter_mut().enumerate() {
            if d % 2 == 1 {
                band.iter_mut().for_each(|c| *c = -*c);
            }
        }
        out
    }

    /// Number of off-diagonals kept on each side.
    pub fn reach(&self) -> usize {
        self.upper.len().saturating_sub(1)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn q_min(&self) -> i64 {
        self.q_min
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        let n = self.len;
        assert_eq!(input.len(), n);
        for (o, (u, x)) in out.iter_mut().zip(self.upper[0].iter().zip(input)) {
            *o = u * x;
        }
        for (d, band) in self.upper.iter().enumerate().skip(1) {
            for i in 0..n - d {
                let u = band[i];
                out[i] += u * input[i + d];
                out[i + d] += u * input[i];
            }
        }
    }

    pub fn apply(&self, state: &LadderState) -> Result<LadderState> {
        assert_eq!(state.q_min(), self.q_min, "propagator built for a different ladder");
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        self.apply_into(state.amplitudes(), &mut out);
        let out = LadderState::from_amplitudes(state.beta(), state.q_min(), out);
        out.check_truncation()?;
        Ok(out)
    }
}

/// Both pulse propagators of one (V₀, τ_p) on a fixed fiber, reused across
/// periods. Only the free flight depends on T, so an ε-scan pays for the
/// eigendecomposition once.
#[derive(Clone, Debug)]
pub struct FiniteSequence {
    params: PhysicalParams,
    pulses: usize,
    depth: f64,
    duration: f64,
    beta: f64,
    forward: PulsePropagator,
    reversed: PulsePropagator,
}

impl FiniteSequence {
    /// Builds the propagators on a ladder wide enough for the resonant
    /// sequence, widening as the edge monitor requires.
    pub fn new(
        params: &PhysicalParams,
        pulses: usize,
        depth: f64,
        duration: f64,
        beta: f64,
    ) -> Result<Self> {
        // Validate through the spec type; T_T stands in for the period.
        let period = params.talbot_time.max(duration);
        let spec = FinitePulseSpec::new(pulses, depth, duration, period)?;
        let mut hw = spec.half_width();
        for _ in 0..MAX_WIDENINGS {
            let seq = Self::with_half_width(params, pulses, depth, duration, beta, hw);
            match seq.run(period) {
                Ok(_) => return Ok(seq),
                Err(Error::Truncation { .. }) => hw += hw / 2 + 8,
                Err(e) => return Err(e),
            }
        }
        Err(Error::NonConvergence {
            what: "finite-pulse ladder sizing",
            detail: format!("edge population still above limit at half-width {hw}"),
        })
    }

    pub fn with_half_width(
        params: &PhysicalParams,
        pulses: usize,
        depth: f64,
        duration: f64,
        beta: f64,
        half_width: usize,
    ) -> Self {
        let hw = half_width as i64;
        let len = 2 * half_width + 1;
        let forward =
            PulseEigenbasis::new(beta, -hw, len, depth, params).propagator(duration, params);
        let reversed = forward.reversed();
        Self {
            params: *params,
            pulses,
            depth,
            duration,
            beta,
            forward,
            reversed,
        }
    }

    pub fn half_width(&self) -> usize {
        (self.forward.len() - 1) / 2
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn pulses(&self) -> usize {
        self.pulses
    }

    pub fn propagator(&self, sign: KickSign) -> &PulsePropagator {
        match sign {
            KickSign::Forward => &self.forward,
            KickSign::Reversed => &self.reversed,
        }
    }

    /// Runs both trains from `|q = 0⟩` with period T.
    pub fn run(&self, period: f64) -> Result<AskrsOutcome> {
        if !(period >= self.duration && period.is_finite()) {
            return Err(Error::invalid(format!(
                "period {period:e} s is shorter than the pulse {:e} s",
                self.duration
            )));
        }
        let hw = self.half_width();
        let mut state = LadderState::zero_momentum(self.beta, hw);
        let free = free_evolution_factors(
            self.beta,
            state.q_min(),
            state.len(),
            period - self.duration,
            &self.params,
        );
        let mut scratch = vec![Complex64::new(0.0, 0.0); state.len()];
        for prop in [&self.forward, &self.reversed] {
            for _ in 0..self.pulses {
                prop.apply_into(state.amplitudes(), &mut scratch);
                let amps = state.amplitudes_mut();
                amps.copy_from_slice(&scratch);
                amps.iter_mut().zip(&free).for_each(|(c, f)| *c *= f);
                state.check_truncation()?;
            }
        }
        Ok(AskrsOutcome {
            output: state.return_probability(),
            state,
        })
    }

    /// `|c_0|²` at period T, on a wider ladder if this one truncates.
    pub fn output(&self, period: f64) -> Result<f64> {
        match self.run(period) {
            Ok(o) => Ok(o.output),
            Err(Error::Truncation { half_width, .. }) => {
                let wider = Self::with_half_width(
                    &self.params,
                    self.pulses,
                    self.depth,
                    self.duration,
                    self.beta,
                    half_width + half_width / 2 + 8,
                );
                wider.run(period).map(|o| o.output)
            }
            Err(e) => Err(e),
        }
    }
}

/// Both trains of finite pulses on the fiber β from `|q = 0⟩`.
pub fn run_finite_askrs(
    spec: &FinitePulseSpec,
    beta: f64,
    params: &PhysicalParams,
) -> Result<AskrsOutcome> {
    FiniteSequence::new(params, spec.pulses, spec.depth, spec.duration, beta)?.run(spec.period)
}

/// The pulse duration reaching δ-kick strength `phi_d` at depth V₀, written
/// through γ: `τ = φ_d T_T/(2πγ)`.
pub fn duration_for_phi(params: &PhysicalParams, gamma: f64, phi_d: f64) -> f64 {
    phi_d * params.talbot_time / (2.0 * PI * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{apply_free_evolution, apply_kick, run_askrs, SequenceSpec};

    fn params() -> PhysicalParams {
        PhysicalParams::rubidium85()
    }

    #[test]
    fn spec_validation() {
        let p = params();
        assert!(FinitePulseSpec::from_gamma(&p, 4, 10.0, 2e-6, p.talbot_time).is_ok());
        assert!(FinitePulseSpec::from_gamma(&p, 4, 10.0, 2e-4, p.talbot_time).is_err());
        assert!(FinitePulseSpec::from_gamma(&p, 4, 10.0, -1e-9, p.talbot_time).is_err());
        assert!(FinitePulseSpec::from_gamma(&p, 0, 10.0, 1e-6, p.talbot_time).is_err());
        let s = FinitePulseSpec::from_gamma(&p, 4, 10.0, 2e-6, p.talbot_time).unwrap();
        assert!((s.gamma(&p) - 10.0).abs() < 1e-12);
        let phi = crate::units::phi_from_gamma(&p, 10.0, 2e-6);
        assert!((s.phi_d() / phi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_propagator_is_unitary_and_symmetric() {
        let p = params();
        let v0 = p.depth_from_gamma(10.0);
        let prop = PulsePropagator::new(0.1, -20, 41, v0, 5e-6, KickSign::Forward, &p);
        let mut cols = Vec::new();
        for k in 0..41 {
            let mut e = vec![Complex64::new(0.0, 0.0); 41];
            e[k] = Complex64::new(1.0, 0.0);
            let mut out = vec![Complex64::new(0.0, 0.0); 41];
            prop.apply_into(&e, &mut out);
            cols.push(out);
        }
        for i in 0..41 {
            for j in 0..41 {
                let dot: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-12, "({i},{j}) {dot}");
            }
        }
        assert!(prop.reach() < 40);
    }

    #[test]
    fn splitting_matches_exact_propagator() {
        let p = params();
        let v0 = p.depth_from_gamma(10.0);
        let s0 = LadderState::zero_momentum(0.2, 25);
        for sign in [KickSign::Forward, KickSign::Reversed] {
            let split = apply_finite_pulse(&s0, v0, 5e-6, sign, &p).unwrap();
            let exact = PulsePropagator::new(0.2, -25, 51, v0, 5e-6, sign, &p)
                .apply(&s0)
                .unwrap();
            assert!(split.state.distance(&exact) < 1e-8, "{}", split.state.distance(&exact));
        }
    }

    #[test]
    fn splitting_error_decreases_under_doubling() {
        let p = params();
        let v0 = p.depth_from_gamma(5.0);
        let s0 = LadderState::zero_momentum(0.0, 20);
        let exact = PulsePropagator::new(0.0, -20, 41, v0, 4e-6, KickSign::Forward, &p)
            .apply(&s0)
            .unwrap();
        let mut last = f64::INFINITY;
        for m in [8usize, 16, 32, 64, 128, 256] {
            let e = strang_pulse(&s0, v0, 4e-6, KickSign::Forward, &p, m).distance(&exact);
            assert!(e < last, "M = {m}: {e} vs {last}");
            // second order: each doubling cuts the error about fourfold
            if last.is_finite() {
                assert!(e < 0.3 * last);
            }
            last = e;
        }
    }

    #[test]
    fn substeps_are_unitary() {
        let p = params();
        let v0 = p.depth_from_gamma(20.0);
        let s0 = LadderState::zero_momentum(0.3, 30);
        for m in [1usize, 3, 50] {
            let out = strang_pulse(&s0, v0, 3e-6, KickSign::Reversed, &p, m);
            assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_kick_limit() {
        let p = params();
        let phi = 0.7;
        let s0 = LadderState::zero_momentum(0.0, 20);
        let kick = apply_kick(&s0, phi, KickSign::Forward).unwrap();
        // The pulse also carries τ_p of free flight, which the bare kick
        // lacks: the distance to it closes only linearly in τ_p.
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let tau = p.talbot_time / 1e4 / 2f64.powi(k);
            let v0 = 2.0 * HBAR * phi / tau;
            let pulse = apply_finite_pulse(&s0, v0, tau, KickSign::Forward, &p).unwrap();
            let d = pulse.state.distance(&kick);
            if last.is_finite() {
                assert!((last / d - 2.0).abs() < 0.01, "{last:e} / {d:e}");
            }
            last = d;
        }
        // The kick strength stays finite in this limit, so the double
        // commutator of the splitting also closes only linearly; the
        // 1e-6 level is reached near τ_p = T_T/10⁶ for a kick centred in the
        // pulse window and near T_T/10⁷ for the bare kick.
        let tau = p.talbot_time / 1e7;
        let v0 = 2.0 * HBAR * phi / tau;
        let pulse = apply_finite_pulse(&s0, v0, tau, KickSign::Forward, &p).unwrap();
        assert!(pulse.state.distance(&kick) < 1e-6);
        let tau = p.talbot_time / 1e6;
        let v0 = 2.0 * HBAR * phi / tau;
        let pulse = apply_finite_pulse(&s0, v0, tau, KickSign::Forward, &p).unwrap();
        let centred = apply_free_evolution(
            &apply_kick(&apply_free_evolution(&s0, tau / 2.0, &p), phi, KickSign::Forward).unwrap(),
            tau / 2.0,
            &p,
        );
        assert!(pulse.state.distance(&centred) < 1e-6, "{}", pulse.state.distance(&centred));
    }

    #[test]
    fn zero_depth_is_free_flight() {
        let p = params();
        let s0 = apply_kick(&LadderState::zero_momentum(0.15, 20), 1.0, KickSign::Forward).unwrap();
        let pulse = apply_finite_pulse(&s0, 0.0, 7e-6, KickSign::Forward, &p).unwrap();
        let free = apply_free_evolution(&s0, 7e-6, &p);
        assert!(pulse.state.distance(&free) < 1e-12);
        let exact = PulsePropagator::new(0.15, -20, 41, 0.0, 7e-6, KickSign::Forward, &p)
            .apply(&s0)
            .unwrap();
        assert!(exact.distance(&free) < 1e-12);
        assert_eq!(exact_reach_for_free(&p), 0);
    }

    fn exact_reach_for_free(p: &PhysicalParams) -> usize {
        PulsePropagator::new(0.0, -5, 11, 0.0, 1e-6, KickSign::Forward, p).reach()
    }

    #[test]
    fn zero_duration_reduces_to_delta_sequence() {
        let p = params();
        let spec = FinitePulseSpec::new(6, 1e-29, 0.0, p.talbot_time + 2e-9).unwrap();
        let out = run_finite_askrs(&spec, 0.0, &p).unwrap();
        let delta = run_askrs(&SequenceSpec::new(6, 0.0, p.talbot_time + 2e-9, 0.0).unwrap(), 0.0, &p)
            .unwrap();
        assert!((out.output - delta.output).abs() < 1e-12);
    }

    #[test]
    fn short_pulses_approach_delta_output() {
        let p = params();
        let (n, phi, eps) = (10usize, 0.5, 4e-9);
        let delta = run_askrs(&SequenceSpec::with_detuning(&p, n, phi, eps).unwrap(), 0.0, &p)
            .unwrap()
            .output;
        let mut last = f64::INFINITY;
        for k in 0..5 {
            let tau = p.talbot_time / 1e3 / 2f64.powi(k);
            let v0 = 2.0 * HBAR * phi / tau;
            let seq = FiniteSequence::new(&p, n, v0, tau, 0.0).unwrap();
            let i = seq.output(p.talbot_time + eps).unwrap();
            let gap = (i - delta).abs();
            assert!(gap < last, "τ = {tau:e}: {gap:e} vs {last:e}");
            last = gap;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn resonant_finite_train_loses_a_little() {
        let p = params();
        let v0 = p.depth_from_gamma(10.0);
        let seq = FiniteSequence::new(&p, 8, v0, 1e-6, 0.0).unwrap();
        let i = seq.output(p.talbot_time).unwrap();
        assert!(i < 1.0 && i > 0.9, "{i}");
    }

    #[test]
    fn wider_ladder_does_not_change_the_output() {
        let p = params();
        let v0 = p.depth_from_gamma(10.0);
        let seq = FiniteSequence::new(&p, 8, v0, 2e-6, 0.05).unwrap();
        let wide =
            FiniteSequence::with_half_width(&p, 8, v0, 2e-6, 0.05, seq.half_width() + 20);
        let t = p.talbot_time + 3e-8;
        let a = seq.run(t).unwrap();
        let b = wide.run(t).unwrap();
        assert!(a.state.distance(&b.state) < 1e-10);
    }
}

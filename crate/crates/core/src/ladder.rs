//! Exact stroboscopic evolution on a quasimomentum fiber.
//!
//! A fiber with quasimomentum β holds the momenta `(q + β)ħκ`, `q ∈ ℤ`,
//! truncated to `q_min..=q_max`. The standing-wave kick
//! `exp(∓iφ_d cos κx)` becomes a convolution with `(∓i)^Δ J_Δ(φ_d)` along the
//! ladder, and free flight is diagonal.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::bessel::bessel_j_truncated;
use crate::error::{Error, Result};
use crate::par;
use crate::units::{PhysicalParams, HBAR};

/// Sites at each end of the ladder watched for truncation.
pub const EDGE_BAND: usize = 5;
/// Largest population tolerated in the edge band.
pub const EDGE_LIMIT: f64 = 1e-12;
/// Kick couplings with |J_Δ(φ_d)| below this are dropped.
pub const BESSEL_CUTOFF: f64 = 1e-16;

/// Phase of the standing wave for a kick: `Forward` is `exp(-iφ cos κx)`,
/// `Reversed` the π-shifted `exp(+iφ cos κx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KickSign {
    Forward,
    Reversed,
}

impl KickSign {
    pub fn value(self) -> f64 {
        match self {
            KickSign::Forward => 1.0,
            KickSign::Reversed => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            KickSign::Forward => KickSign::Reversed,
            KickSign::Reversed => KickSign::Forward,
        }
    }
}

/// Amplitudes on one quasimomentum fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderState {
    beta: f64,
    q_min: i64,
    amps: Vec<Complex64>,
}

impl LadderState {
    /// `|q = 0⟩` on the fiber β, ladder `-half_width..=half_width`.
    pub fn zero_momentum(beta: f64, half_width: usize) -> Self {
        Self::basis(beta, half_width, 0)
    }

    /// `|q⟩` on the fiber β.
    pub fn basis(beta: f64, half_width: usize, q: i64) -> Self {
        let hw = half_width as i64;
        assert!(q.abs() <= hw, "site {q} outside ladder of half-width {hw}");
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
        amps[(q + hw) as usize] = Complex64::new(1.0, 0.0);
        Self {
            beta,
            q_min: -hw,
            amps,
        }
    }

    pub fn from_amplitudes(beta: f64, q_min: i64, amps: Vec<Complex64>) -> Self {
        assert!(!amps.is_empty(), "ladder needs at least one site");
        Self { beta, q_min, amps }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn q_min(&self) -> i64 {
        self.q_min
    }

    pub fn q_max(&self) -> i64 {
        self.q_min + self.amps.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Half-width of a symmetric ladder.
    pub fn half_width(&self) -> usize {
        (self.amps.len() - 1) / 2
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.amps.len() as i64).map(move |i| self.q_min + i)
    }

    pub fn index_of(&self, q: i64) -> Option<usize> {
        let i = q - self.q_min;
        (i >= 0 && (i as usize) < self.amps.len()).then_some(i as usize)
    }

    /// Amplitude on site `q`; zero outside the ladder.
    pub fn amplitude(&self, q: i64) -> Complex64 {
        self.index_of(q)
            .map(|i| self.amps[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Population in the outermost [`EDGE_BAND`] sites at both ends.
    pub fn edge_population(&self) -> f64 {
        let n = self.amps.len();
        let band = EDGE_BAND.min(n / 2);
        self.amps[..band]
            .iter()
            .chain(&self.amps[n - band..])
            .map(|c| c.norm_sqr())
            .sum()
    }

    pub fn check_truncation(&self) -> Result<()> {
        let edge = self.edge_population();
        if edge > EDGE_LIMIT {
            return Err(Error::Truncation {
                edge_population: edge,
                limit: EDGE_LIMIT,
                half_width: self.half_width(),
            });
        }
        Ok(())
    }

    /// Population of the starting site `q = 0`.
    pub fn return_probability(&self) -> f64 {
        self.amplitude(0).norm_sqr()
    }

    /// Standard deviation of q under the populations.
    pub fn momentum_spread(&self) -> f64 {
        let norm = self.norm_sqr();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (q, c) in self.sites().zip(&self.amps) {
            let p = c.norm_sqr() / norm;
            m1 += p * q as f64;
            m2 += p * (q * q) as f64;
        }
        (m2 - m1 * m1).max(0.0).sqrt()
    }

    /// Euclidean distance between amplitude vectors, aligning sites by q.
    pub fn distance(&self, other: &LadderState) -> f64 {
        let lo = self.q_min.min(other.q_min);
        let hi = self.q_max().max(other.q_max());
        (lo..=hi)
            .map(|q| (self.amplitude(q) - other.amplitude(q)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Same amplitudes on a wider (or narrower) symmetric ladder.
    pub fn resized(&self, half_width: usize) -> LadderState {
        let hw = half_width as i64;
        let amps = (-hw..=hw).map(|q| self.amplitude(q)).collect();
        LadderState {
            beta: self.beta,
            q_min: -hw,
            amps,
        }
    }
}

/// Ladder half-width large enough for `pulses` kicks of strength `phi_d`.
pub fn auto_half_width(pulses: usize, phi_d: f64) -> usize {
    let spread = pulses as f64 * phi_d.abs();
    (spread + 10.0 + 4.0 * spread.cbrt()).ceil() as usize
}

/// A δ-kick with precomputed ladder couplings.
#[derive(Clone, Debug)]
pub struct KickOperator {
    reach: usize,
    // couplings for Δ = -reach..=reach
    coeffs: Vec<Complex64>,
}

impl KickOperator {
    pub fn new(phi_d: f64, sign: KickSign) -> Self {
        let j = bessel_j_truncated(phi_d, BESSEL_CUTOFF);
        let reach = j.len() - 1;
        let unit = Complex64::new(0.0, -sign.value());
        let coeffs = (-(reach as i64)..=reach as i64)
            .map(|d| {
                let jd = j[d.unsigned_abs() as usize];
                let jd = if d < 0 && d % 2 != 0 { -jd } else { jd };
                unit.powi(d as i32) * jd
            })
            .collect();
        Self { reach, coeffs }
    }

    /// Largest momentum transfer |Δ| kept.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// `out[q] = Σ_Δ coupling(Δ) · input[q - Δ]`. Population pushed past the
    /// ladder ends is dropped; callers check the edge band.
    pub fn apply_into(&self, input: &[Complex64], out: &mut [Complex64]) {
        let n = input.len();
        let r = self.reach as i64;
        out.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (k, &coef) in self.coeffs.iter().enumerate() {
            let d = k as i64 - r;
            // out[i] += coef * input[i - d] for 0 <= i - d < n
            let (lo, hi) = if d >= 0 {
                (d as usize, n)
            } else {
                (0, (n as i64 + d).max(0) as usize)
            };
            for i in lo..hi {
                out[i] += coef * input[(i as i64 - d) as usize];
            }
        }
    }

    pub fn apply(&self, state: &LadderState) -> Result<LadderState> {
        let mut out = state.clone();
        self.apply_into(&state.amps, &mut out.amps);
        out.check_truncation()?;
        Ok(out)
    }
}

pub fn apply_kick(state: &LadderState, phi_d: f64, sign: KickSign) -> Result<LadderState> {
    KickOperator::new(phi_d, sign).apply(state)
}

/// Free-flight phase `2π x (q+β)²` with `x = T/T_T`. The integer part of x
/// contributes only `2π l (2qβ + β²)` modulo 2π and is reduced before the
/// multiplication, so exact revivals stay exact.
pub(crate) fn free_phase(x: f64, q: i64, beta: f64) -> f64 {
    let l = x.round();
    let f = x - l;
    let qb = q as f64 + beta;
    TAU * (f * qb * qb + l * (2.0 * q as f64 * beta + beta * beta))
}

/// Diagonal factors `exp(-i 2π (T/T_T)(q+β)²)` for the sites of `state`.
pub fn free_evolution_factors(
    beta: f64,
    q_min: i64,
    len: usize,
    duration: f64,
    params: &PhysicalParams,
) -> Vec<Complex64> {
    let x = duration / params.talbot_time;
    (0..len as i64)
        .map(|i| Complex64::from_polar(1.0, -free_phase(x, q_min + i, beta)))
        .collect()
}

pub fn apply_free_evolution(
    state: &LadderState,
    duration: f64,
    params: &PhysicalParams,
) -> LadderState {
    let mut out = state.clone();
    let f = free_evolution_factors(state.beta, state.q_min, state.len(), duration, params);
    out.amps.iter_mut().zip(&f).for_each(|(c, f)| *c *= f);
    out
}

/// Phases of free flight in the freely falling frame over
/// `[t_start, t_start + duration]`: the time integral of
/// `((q+β)ħκ - m a t)²/(2mħ)`.
fn accelerated_phases(
    beta: f64,
    q_min: i64,
    len: usize,
    duration: f64,
    params: &PhysicalParams,
    accel: f64,
    t_start: f64,
) -> impl Iterator<Item = f64> + '_ {
    let x = duration / params.talbot_time;
    let t0 = t_start;
    let t1 = t_start + duration;
    let sq = duration * (t0 + t1);
    let cube = duration * (t1 * t1 + t1 * t0 + t0 * t0);
    let linear = 0.5 * params.kappa * accel * sq;
    let global = params.mass * accel * accel * cube / (6.0 * HBAR);
    (0..len as i64).map(move |i| {
        let q = q_min + i;
        free_phase(x, q, beta) - (q as f64 + beta) * linear + global
    })
}

pub fn apply_free_evolution_accelerated(
    state: &LadderState,
    duration: f64,
    params: &PhysicalParams,
    accel: f64,
    t_start: f64,
) -> LadderState {
    let mut out = state.clone();
    let phases = accelerated_phases(
        state.beta,
        state.q_min,
        state.len(),
        duration,
        params,
        accel,
        t_start,
    );
    out.amps
        .iter_mut()
        .zip(phases)
        .for_each(|(c, ph)| *c *= Complex64::from_polar(1.0, -ph));
    out
}

/// One interferometer sequence: `pulses` kick-then-flight periods with the
/// forward standing wave followed by `pulses` with the π-shifted one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceSpec {
    pub pulses: usize,
    pub phi_d: f64,
    /// Kick-to-kick period T, s.
    pub period: f64,
    /// Constant acceleration, m/s².
    pub acceleration: f64,
}

impl SequenceSpec {
    pub fn new(pulses: usize, phi_d: f64, period: f64, acceleration: f64) -> Result<Self> {
        if pulses == 0 {
            return Err(Error::invalid("at least one pulse per train is required"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid(format!("period must be positive, got {period}")));
        }
        if !phi_d.is_finite() || !acceleration.is_finite() {
            return Err(Error::invalid("kick strength and acceleration must be finite"));
        }
        Ok(Self {
            pulses,
            phi_d,
            period,
            acceleration,
        })
    }

    /// Period `T_T + eps`.
    pub fn with_detuning(
        params: &PhysicalParams,
        pulses: usize,
        phi_d: f64,
        eps: f64,
    ) -> Result<Self> {
        Self::new(pulses, phi_d, params.talbot_time + eps, 0.0)
    }

    pub fn resonant(params: &PhysicalParams, pulses: usize, phi_d: f64) -> Result<Self> {
        Self::with_detuning(params, pulses, phi_d, 0.0)
    }

    pub fn with_acceleration(mut self, acceleration: f64) -> Self {
        self.acceleration = acceleration;
        self
    }

    pub fn detuning(&self, params: &PhysicalParams) -> f64 {
        self.period - params.talbot_time
    }

    pub fn half_width(&self) -> usize {
        auto_half_width(self.pulses, self.phi_d)
    }
}

/// Applies one train of `spec.pulses` periods with the given kick sign. The
/// first period starts at `first_period · T`, which only matters under
/// acceleration.
pub fn apply_train(
    state: &LadderState,
    spec: &SequenceSpec,
    sign: KickSign,
    first_period: usize,
    params: &PhysicalParams,
) -> Result<LadderState> {
    let kick = KickOperator::new(spec.phi_d, sign);
    let mut runner = TrainRunner::new(state, spec, params);
    runner.run(&kick, first_period, spec.pulses, |_, _| ())?;
    Ok(runner.into_state())
}

struct TrainRunner<'a> {
    spec: &'a SequenceSpec,
    params: &'a PhysicalParams,
    cur: LadderState,
    scratch: Vec<Complex64>,
    free: Option<Vec<Complex64>>,
}

impl<'a> TrainRunner<'a> {
    fn new(state: &LadderState, spec: &'a SequenceSpec, params: &'a PhysicalParams) -> Self {
        let free = (spec.acceleration == 0.0).then(|| {
            free_evolution_factors(state.beta, state.q_min, state.len(), spec.period, params)
        });
        Self {
            spec,
            params,
            cur: state.clone(),
            scratch: vec![Complex64::new(0.0, 0.0); state.len()],
            free,
        }
    }

    fn run(
        &mut self,
        kick: &KickOperator,
        first_period: usize,
        count: usize,
        mut observe: impl FnMut(usize, &LadderState),
    ) -> Result<()> {
        for k in first_period..first_period + count {
            kick.apply_into(&self.cur.amps, &mut self.scratch);
            std::mem::swap(&mut self.cur.amps, &mut self.scratch);
            match &self.free {
                Some(f) => self.cur.amps.iter_mut().zip(f).for_each(|(c, f)| *c *= f),
                None => {
                    let t_start = k as f64 * self.spec.period;
                    let phases = accelerated_phases(
                        self.cur.beta,
                        self.cur.q_min,
                        self.cur.amps.len(),
                        self.spec.period,
                        self.params,
                        self.spec.acceleration,
                        t_start,
                    );
                    self.cur
                        .amps
                        .iter_mut()
                        .zip(phases)
                        .for_each(|(c, ph)| *c *= Complex64::from_polar(1.0, -ph));
                }
            }
            self.cur.check_truncation()?;
            observe(k, &self.cur);
        }
        Ok(())
    }

    fn into_state(self) -> LadderState {
        self.cur
    }
}

#[derive(Clone, Debug)]
pub struct AskrsOutcome {
    pub state: LadderState,
    /// Return probability to the initial site, `|c_{q=0}|²`.
    pub output: f64,
}

/// Widenings tried when the edge monitor trips on an auto-sized ladder.
const MAX_WIDENINGS: usize = 8;

/// Next half-width after a truncation.
pub(crate) fn widen(half_width: usize) -> usize {
    half_width + half_width / 2 + 8
}

/// Runs both trains on `|q = 0⟩` of the fiber β with an auto-sized ladder.
/// Away from resonance the second train need not undo the first, so the
/// ladder is widened whenever the edge monitor trips.
pub fn run_askrs(spec: &SequenceSpec, beta: f64, params: &PhysicalParams) -> Result<AskrsOutcome> {
    run_askrs_growing(spec, beta, params, spec.half_width())
}

/// [`run_askrs`] starting from a given half-width.
pub fn run_askrs_growing(
    spec: &SequenceSpec,
    beta: f64,
    params: &PhysicalParams,
    half_width: usize,
) -> Result<AskrsOutcome> {
    let mut hw = half_width;
    let mut last = None;
    for _ in 0..MAX_WIDENINGS {
        match run_askrs_on(spec, beta, params, hw, |_, _| ()) {
            Err(e @ Error::Truncation { .. }) => {
                last = Some(e);
                hw = widen(hw);
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

fn run_askrs_on(
    spec: &SequenceSpec,
    beta: f64,
    params: &PhysicalParams,
    half_width: usize,
    mut observe: impl FnMut(usize, &LadderState),
) -> Result<AskrsOutcome> {
    let initial = LadderState::zero_momentum(beta, half_width);
    let mut runner = TrainRunner::new(&initial, spec, params);
    let forward = KickOperator::new(spec.phi_d, KickSign::Forward);
    let reversed = KickOperator::new(spec.phi_d, KickSign::Reversed);
    runner.run(&forward, 0, spec.pulses, &mut observe)?;
    runner.run(&reversed, spec.pulses, spec.pulses, &mut observe)?;
    let state = runner.into_state();
    Ok(AskrsOutcome {
        output: state.return_probability(),
        state,
    })
}

/// Same as [`run_askrs`] on an explicit ladder half-width.
pub fn run_askrs_with_half_width(
    spec: &SequenceSpec,
    beta: f64,
    params: &PhysicalParams,
    half_width: usize,
) -> Result<AskrsOutcome> {
    run_askrs_on(spec, beta, params, half_width, |_, _| ())
}

/// Momentum populations recorded after each of the `2N` periods.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumHistory {
    pub q_min: i64,
    pub q_max: i64,
    /// `rows[k][i]` is the population of site `q_min + i` after kick `k + 1`.
    pub rows: Vec<Vec<f64>>,
}

impl MomentumHistory {
    pub fn spreads(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                let (mut m1, mut m2) = (0.0, 0.0);
                for (i, p) in row.iter().enumerate() {
                    let q = (self.q_min + i as i64) as f64;
                    m1 += p * q;
                    m2 += p * q * q;
                }
                (m2 - m1 * m1).max(0.0).sqrt()
            })
            .collect()
    }
}

pub fn momentum_history(
    spec: &SequenceSpec,
    beta: f64,
    params: &PhysicalParams,
) -> Result<MomentumHistory> {
    let mut hw = spec.half_width();
    for _ in 0..MAX_WIDENINGS {
        let mut rows = Vec::with_capacity(2 * spec.pulses);
        match run_askrs_on(spec, beta, params, hw, |_, s| rows.push(s.populations())) {
            Ok(_) => {
                return Ok(MomentumHistory {
                    q_min: -(hw as i64),
                    q_max: hw as i64,
                    rows,
                })
            }
            Err(Error::Truncation { .. }) => hw = widen(hw),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergence {
        what: "ladder sizing",
        detail: format!("edge population above limit at half-width {hw}"),
    })
}

/// Minimum-uncertainty Gaussian wavepacket centred on zero momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavepacket {
    /// Standard deviation of the position density |ψ(x)|², m.
    pub sigma: f64,
}

impl Wavepacket {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::invalid(format!("wavepacket width must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }

    /// Standard deviation of the momentum density, ħ/(2σ).
    pub fn momentum_width(&self) -> f64 {
        HBAR / (2.0 * self.sigma)
    }

    /// Momentum width in ladder units.
    pub fn ladder_width(&self, params: &PhysicalParams) -> f64 {
        params.momentum_to_ladder(self.momentum_width())
    }
}

/// Relative tolerance of the quasimomentum quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-4;
const QUADRATURE_SPAN: f64 = 8.0;
const QUADRATURE_MAX_INTERVALS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureOutcome {
    pub output: f64,
    /// Change between the last two refinements.
    pub error: f64,
    /// Number of fibers evaluated.
    pub fibers: usize,
}

/// `∫ dβ w(β) f(β)` for a normal density w of standard deviation `width`.
///
/// Trapezoid rule on ±8 widths, refined by interval doubling until two
/// successive sums agree to `rel_tol`. `feature` is the narrowest scale of f
/// expected; the starting grid resolves it with four nodes.
pub fn fiber_quadrature<F>(width: f64, feature: f64, rel_tol: f64, f: F) -> Result<QuadratureOutcome>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    if width <= 0.0 || width < 1e-15 {
        return Ok(QuadratureOutcome {
            output: f(0.0)?,
            error: 0.0,
            fibers: 1,
        });
    }
    let span = QUADRATURE_SPAN * width;
    let mut intervals = 32usize;
    if feature.is_finite() && feature > 0.0 {
        while (2.0 * span / intervals as f64) > feature / 4.0 && intervals < QUADRATURE_MAX_INTERVALS / 4 {
            intervals *= 2;
        }
    }
    let weight = |b: f64| (-0.5 * (b / width).powi(2)).exp() / (width * TAU.sqrt());

    let eval = |nodes: &[f64]| -> Result<f64> {
        let vals = par::map(nodes, |&b| f(b).map(|v| v * weight(b)));
        let mut sum = 0.0;
        for v in vals {
            sum += v?;
        }
        Ok(sum)
    };

    let h0 = 2.0 * span / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| -span + i as f64 * h0).collect();
    let ends = f(-span)? * weight(-span) + f(span)? * weight(span);
    let mut sum = eval(&nodes[1..intervals])? + 0.5 * ends;
    let mut estimate = sum * h0;
    let mut fibers = intervals + 1;
    let mut last_change = f64::INFINITY;
    let mut levels = 0;
    while intervals < QUADRATURE_MAX_INTERVALS {
        let h = 2.0 * span / intervals as f64;
        let mids: Vec<f64> = (0..intervals).map(|i| -span + (i as f64 + 0.5) * h).collect();
        sum += eval(&mids)?;
        fibers += intervals;
        intervals *= 2;
        let refined = sum * (h / 2.0);
        last_change = (refined - estimate).abs();
        estimate = refined;
        levels += 1;
        if levels >= 2 && last_change <= rel_tol * estimate.abs() + 1e-14 {
            return Ok(QuadratureOutcome {
                output: estimate,
                error: last_change,
                fibers,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "quasimomentum quadrature",
        detail: format!("achieved change {last_change:.3e} at {fibers} fibers (value {estimate:.6})"),
    })
}

/// Output for a Gaussian input: the q = 0 return probability of each fiber
/// averaged over the initial momentum density.
pub fn gaussian_output(
    spec: &SequenceSpec,
    wavepacket: &Wavepacket,
    params: &PhysicalParams,
) -> Result<QuadratureOutcome> {
    let width = wavepacket.ladder_width(params);
    let hw = spec.half_width();
    // FWHM in β of the zero-detuning momentum filter
    let n = spec.pulses as f64;
    let feature = 0.18 / (n * n * spec.phi_d.abs().max(1e-3));
    fiber_quadrature(width, feature, QUADRATURE_TOLERANCE, |beta| {
        run_askrs_growing(spec, beta, params, hw).map(|o| o.output)
    })
}

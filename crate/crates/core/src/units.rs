//! Physical constants and the scales derived from atom mass and laser
//! wavelength.
//!
//! Times are SI seconds throughout. Momenta inside the engines are measured in
//! units of the grating recoil `ħκ`, so the free-flight phase of ladder site
//! `q` over a time `T` is simply `2π (T/T_T) (q + β)²`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of ⁸⁵Rb in atomic mass units.
pub const RB85_MASS_U: f64 = 84.911_789_738;

/// Rubidium D2 wavelength used for the standing wave, m.
pub const DEFAULT_WAVELENGTH: f64 = 780e-9;

/// Atom and lattice scales. Construct with [`PhysicalParams::new`]; all
/// derived fields are computed once there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Atom mass, kg.
    pub mass: f64,
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// Laser wavenumber 2π/λ, 1/m.
    pub k_laser: f64,
    /// Grating wavenumber 2k_L, 1/m.
    pub kappa: f64,
    /// Recoil angular frequency ħk_L²/(2m), rad/s.
    pub omega_r: f64,
    /// Talbot time 2π/(4ω_r), s.
    pub talbot_time: f64,
}

impl PhysicalParams {
    pub fn new(mass: f64, wavelength: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        let k_laser = TAU / wavelength;
        let kappa = 2.0 * k_laser;
        let omega_r = HBAR * k_laser * k_laser / (2.0 * mass);
        let talbot_time = TAU / (4.0 * omega_r);
        Ok(Self {
            mass,
            wavelength,
            k_laser,
            kappa,
            omega_r,
            talbot_time,
        })
    }

    /// Same as [`new`](Self::new) with the mass in atomic mass units and the
    /// wavelength in nanometres.
    pub fn from_lab_units(mass_u: f64, wavelength_nm: f64) -> Result<Self> {
        Self::new(mass_u * ATOMIC_MASS_UNIT, wavelength_nm * 1e-9)
    }

    /// ⁸⁵Rb in a 780 nm standing wave.
    pub fn rubidium85() -> Self {
        Self::new(RB85_MASS_U * ATOMIC_MASS_UNIT, DEFAULT_WAVELENGTH)
            .expect("reference parameters are valid")
    }

    /// Grating recoil momentum ħκ, kg·m/s.
    pub fn recoil_momentum(&self) -> f64 {
        HBAR * self.kappa
    }

    /// ħκ²/(2m) in rad/s. Equals 2π/T_T.
    pub fn phase_rate(&self) -> f64 {
        HBAR * self.kappa * self.kappa / (2.0 * self.mass)
    }

    /// Spatial period of the standing wave 2π/κ, m.
    pub fn lattice_period(&self) -> f64 {
        TAU / self.kappa
    }

    /// Converts a momentum in kg·m/s into ladder units.
    pub fn momentum_to_ladder(&self, p: f64) -> f64 {
        p / self.recoil_momentum()
    }

    pub fn ladder_to_momentum(&self, beta: f64) -> f64 {
        beta * self.recoil_momentum()
    }

    /// Potential depth V₀ (J) for a dimensionless strength γ = mV₀/(ħκ)².
    pub fn depth_from_gamma(&self, gamma: f64) -> f64 {
        let p = self.recoil_momentum();
        gamma * p * p / self.mass
    }

    pub fn gamma_from_depth(&self, depth: f64) -> f64 {
        let p = self.recoil_momentum();
        self.mass * depth / (p * p)
    }

    /// Talbot revival check ħκ²T_T/(2m), equal to 2π.
    pub fn talbot_phase(&self) -> f64 {
        self.phase_rate() * self.talbot_time
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::rubidium85()
    }
}

/// Kick strength in the δ-kick picture, optionally tied to a physical pulse
/// of depth V₀ and duration τ_p through φ_d = V₀τ_p/(2ħ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickStrength {
    pub phi_d: f64,
    /// Potential depth V₀, J.
    pub depth: Option<f64>,
    /// Pulse duration τ_p, s.
    pub duration: Option<f64>,
    /// mV₀/(ħκ)², present whenever `depth` is.
    pub gamma: Option<f64>,
}

impl KickStrength {
    pub fn delta(phi_d: f64) -> Self {
        Self {
            phi_d,
            depth: None,
            duration: None,
            gamma: None,
        }
    }

    pub fn from_pulse(params: &PhysicalParams, depth: f64, duration: f64) -> Result<Self> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::invalid(format!(
                "potential depth must be positive, got {depth}"
            )));
        }
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!(
                "pulse duration must be non-negative, got {duration}"
            )));
        }
        Ok(Self {
            phi_d: depth * duration / (2.0 * HBAR),
            depth: Some(depth),
            duration: Some(duration),
            gamma: Some(params.gamma_from_depth(depth)),
        })
    }

    pub fn from_gamma(params: &PhysicalParams, gamma: f64, duration: f64) -> Result<Self> {
        Self::from_pulse(params, params.depth_from_gamma(gamma), duration)
    }

    /// Pulse duration that realises `phi_d` at depth `depth`.
    pub fn duration_for(phi_d: f64, depth: f64) -> f64 {
        2.0 * HBAR * phi_d / depth
    }
}

/// φ_d of a pulse of strength γ and duration τ, written through T_T:
/// φ_d = 2πγ τ/T_T.
pub fn phi_from_gamma(params: &PhysicalParams, gamma: f64, duration: f64) -> f64 {
    2.0 * PI * gamma * duration / params.talbot_time
}

//! Simulation of an atom interferometer built from two δ-kicked rotor pulse
//! trains, the second one with the standing wave shifted by π.
//!
//! The state of an atom with fixed quasimomentum lives on a discrete ladder of
//! momenta `(q + β)ħκ`. Kicks couple neighbouring ladder sites through Bessel
//! functions, free flight adds quadratic phases, and at the Talbot time every
//! phase is a multiple of 2π so the second train undoes the first.
//!
//! Modules:
//! - [`units`]: physical constants and derived scales.
//! - [`ladder`]: exact stroboscopic evolution with δ-kicks, optional constant
//!   acceleration, Gaussian wavepackets by quasimomentum quadrature.
//! - [`analytic`]: first-order and closed-form predictions of the output.
//! - [`pulse`]: finite pulse duration in the ladder basis.
//! - [`grid`]: independent position-grid split-step propagation.
//! - [`scan`]: parameter sweeps, FWHM extraction, optimal pulse search and
//!   power-law fits.

pub mod analytic;
pub mod bessel;
mod error;
pub mod grid;
pub mod ladder;
mod par;
pub mod pulse;
pub mod scan;
pub mod units;

pub use error::{Error, Result};
pub use ladder::{KickSign, LadderState, SequenceSpec, Wavepacket};
pub use pulse::FinitePulseSpec;
pub use units::{KickStrength, PhysicalParams};

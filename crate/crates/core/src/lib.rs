//! Spectral simulation of a delta-kicked rotor with a two-harmonic ratchet
//! potential and a mean-field self-interaction, plus the closed-form laws it
//! obeys at the quantum resonance and the classical limit of its generalized
//! rotor map.
//!
//! The crate is generic over the floating-point scalar through [`Scalar`];
//! the `*64` aliases at the root fix `f64`, which every quantitative claim in
//! the test suite assumes.
//!
//! The moving parts:
//!
//! - [`grid`]/[`state`]: the angle grid, the momentum ladder, and normalized
//!   states with unitary transforms between both bases.
//! - [`propagator`]: the exact one-kick Floquet map (kick phase, free phase)
//!   and the closed-form resonant state.
//! - [`observables`]/[`fit`]: momentum moments, scrambling correlators,
//!   autocorrelation, quasienergy spectra, and the regressions that extract
//!   growth rates, localization lengths, and critical times.
//! - [`analytic`]: resonance laws and the quadrature oracle, deliberately
//!   sharing no numerics with the propagator.
//! - [`classical`]: harmonic decomposition of the nonlinear kick and the
//!   state-driven classical ensemble map.

pub mod analytic;
pub mod classical;
pub mod error;
pub mod fit;
pub mod grid;
pub mod observables;
pub mod params;
pub mod propagator;
pub mod scalar;
pub mod state;

pub use error::{Result, RotorError};
pub use grid::AngularGrid;
pub use params::{HbarEff, SystemParams};
pub use propagator::{resonance_state, EvolutionReport, EvolveOptions, Propagator};
pub use scalar::Scalar;
pub use state::{Representation, WaveState};

pub use observables::TimeSeries;

/// Concrete `f64` aliases; the default instantiation everywhere.
pub type Grid64 = AngularGrid<f64>;
pub type Params64 = SystemParams<f64>;
pub type State64 = WaveState<f64>;
pub type Propagator64 = Propagator<f64>;
pub type Series64 = TimeSeries<f64>;
pub type C64 = num_complex::Complex<f64>;

use thiserror::Error;

use crate::state::Representation;

/// Errors produced by the rotor library.
///
/// Scalar payloads are stored as `f64` so the error type stays free of the
/// crate's scalar parameter.
#[derive(Debug, Error)]
pub enum RotorError {
    #[error("grid size must be an even integer >= 8, got {0}")]
    InvalidGridSize(usize),

    #[error("effective Planck constant must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("system parameter {name} must be finite, got {value}")]
    NonFiniteParam { name: &'static str, value: f64 },

    #[error("translation parameter epsilon must be >= 0, got {0}")]
    InvalidEpsilon(f64),

    #[error("state is in the {found:?} representation, expected {expected:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },

    #[error("state norm {norm} deviates from 1 beyond tolerance {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("states live on different grids ({0} vs {1} points)")]
    GridMismatch(usize, usize),

    #[error("norm drift {drift:e} exceeded the {limit:e} limit after {kicks} kicks")]
    NormDrift { drift: f64, limit: f64, kicks: u64 },

    #[error(
        "aliasing: outer momentum band holds probability {probability:e} \
         (hard limit {limit:e}) after {kicks} kicks"
    )]
    AliasingLimit {
        probability: f64,
        limit: f64,
        kicks: u64,
    },

    #[error("closed-form resonance state requires the resonant Planck constant (4π flag)")]
    NotResonant,

    #[error("quadrature with {nodes} nodes failed the refinement check (residual {residual:e})")]
    QuadratureNotConverged { nodes: usize, residual: f64 },

    #[error("harmonic cutoff {n_max} exceeds the grid Nyquist limit {limit}")]
    HarmonicCutoff { n_max: usize, limit: usize },

    #[error("fit window [{lo}, {hi}] selects {count} points, need at least {min}")]
    FitWindow {
        lo: f64,
        hi: f64,
        count: usize,
        min: usize,
    },

    #[error("fit input is degenerate: {0}")]
    DegenerateFit(&'static str),

    #[error("autocorrelation window must hold at least {min} kicks, got {got}")]
    WindowTooShort { got: usize, min: usize },

    #[error("time series arrays must share one length")]
    SeriesShape,
}

pub type Result<T> = std::result::Result<T, RotorError>;

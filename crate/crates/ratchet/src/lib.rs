//! Scenario runner, parameter-sweep engine, serialization, and verification
//! for the kicked ratchet rotor simulations in `ratchet-core`.

pub mod config;
pub mod emit;
pub mod error;
pub mod manifest;
pub mod runner;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use config::{ConfigOverlay, RunConfig, Scenario};
pub use error::AppError;
pub use manifest::RunManifest;
pub use scenario::run_scenario;
pub use sweep::run_sweep;

//! The `verify` subcommand: triple agreement between the closed-form laws,
//! the quadrature oracle, and the spectral simulation over a randomized
//! parameter sweep, printed one line per tuple.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

use ratchet_core::analytic::{
    moment_oracle, predict_current, predict_energy, DEFAULT_QUADRATURE_NODES,
};
use ratchet_core::observables::{mean_energy, mean_momentum};
use ratchet_core::{AngularGrid, HbarEff, Propagator, SystemParams, WaveState};

use crate::error::AppError;

pub const VERIFY_TUPLES: usize = 20;
pub const VERIFY_TOLERANCE: f64 = 1e-6;

pub struct VerifyReport {
    pub tuples: usize,
    pub failures: usize,
    pub worst_relative_error: f64,
}

fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1.0)
}

/// Runs the sweep, writing one line per tuple to `out`.
pub fn run_verify(seed: u64, mut out: impl std::io::Write) -> Result<VerifyReport, AppError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let grid = AngularGrid::new(2048, 4.0 * std::f64::consts::PI)
        .map_err(AppError::Numerical)?;
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for case in 0..VERIFY_TUPLES {
        let k = rng.random_range(0.5..2.0);
        let alpha = rng.random_range(-2.0..2.0);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let g = rng.random_range(0.0..10.0);
        let t = rng.random_range(1u64..=100);
        let params =
            SystemParams::new(k, alpha, phi, g, HbarEff::Resonant).map_err(AppError::Numerical)?;

        let law_p = predict_current(&params, t);
        let law_e = predict_energy(&params, t);
        let (oracle_p, oracle_e) = moment_oracle(&params, t, DEFAULT_QUADRATURE_NODES)
            .map_err(AppError::Numerical)?;

        let propagator = Propagator::new(&grid, &params).map_err(AppError::Numerical)?;
        let mut state = WaveState::even_initial(&grid);
        propagator
            .evolve(&mut state, t, |_, _| {})
            .map_err(AppError::Numerical)?;
        let sim_p = mean_momentum(&state).map_err(AppError::Numerical)?;
        let sim_e = mean_energy(&state).map_err(AppError::Numerical)?;

        let errors = [
            rel_err(oracle_p, law_p),
            rel_err(oracle_e, law_e),
            rel_err(sim_p, law_p),
            rel_err(sim_e, law_e),
        ];
        let case_worst = errors.iter().cloned().fold(0.0, f64::max);
        worst = worst.max(case_worst);
        let ok = case_worst <= VERIFY_TOLERANCE;
        if !ok {
            failures += 1;
        }
        writeln!(
            out,
            "tuple {case:2}: K={k:5.3} alpha={alpha:+5.3} phi={phi:5.3} g={g:6.3} t={t:3} \
             | p: law {law_p:+.6e} sim {sim_p:+.6e} | p2: law {law_e:.6e} sim {sim_e:.6e} \
             | worst rel err {case_worst:.2e} {}",
            if ok { "ok" } else { "MISMATCH" }
        )
        .ok();
    }
    Ok(VerifyReport {
        tuples: VERIFY_TUPLES,
        failures,
        worst_relative_error: worst,
    })
}

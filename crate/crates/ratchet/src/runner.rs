//! Single-run machinery shared by scenarios, sweeps, and the verifier.

use ratchet_core::classical::{hybrid_evolve, ClassicalEnsemble, EnsembleSeries};
use ratchet_core::fit::{fit_quadratic_rate, FitResult};
use ratchet_core::observables::{momentum_distribution, MomentumLine, TimeSeries};
use ratchet_core::{
    AngularGrid, Propagator, Representation, Result, RotorError, SystemParams, WaveState,
};

/// Outcome of one quantum trajectory. An aliasing abort is a recorded outcome
/// rather than an error: the series holds every completed kick and `aborted`
/// carries the guard's message.
pub struct SingleRun {
    pub series: TimeSeries<f64>,
    /// State after the last kick (one kick past the last record if aborted).
    pub final_state: WaveState<f64>,
    pub kicks_applied: u64,
    pub norm_drift: f64,
    pub aliasing_flag: bool,
    pub aborted: Option<String>,
    /// First kick at which the aliasing guard warned; data past this point
    /// carries band-truncation artifacts.
    pub warn_kick: Option<u64>,
}

impl SingleRun {
    /// Last kick with guard-clean data.
    pub fn valid_horizon(&self) -> u64 {
        match self.warn_kick {
            Some(w) => w.saturating_sub(1),
            None => self.kicks_applied,
        }
    }

    pub fn final_distribution(&self) -> Result<Vec<MomentumLine<f64>>> {
        momentum_distribution(&self.final_state)
    }
}

/// Evolves the even initial state for `kicks` periods, recording every
/// observable per kick (including the `t = 0` row).
pub fn simulate(params: &SystemParams<f64>, grid_n: usize, kicks: u64) -> Result<SingleRun> {
    let grid = AngularGrid::new(grid_n, params.hbar_value())?;
    let propagator = Propagator::new(&grid, params)?;
    let mut state = WaveState::even_initial(&grid);
    let initial = state.momentum_view()?;
    let mut series = TimeSeries::with_capacity(kicks as usize + 1);
    series.record(0, &initial, &initial, params)?;
    let mut warn_kick = None;
    let result = propagator.evolve(&mut state, kicks, |t, s| {
        if warn_kick.is_none() {
            if let Ok(outer) = s.outer_band_probability(0.1) {
                if outer > propagator.options.aliasing_warn {
                    warn_kick = Some(t);
                }
            }
        }
        series
            .record(t, s, &initial, params)
            .expect("kick indices increase");
    });
    match result {
        Ok(report) => Ok(SingleRun {
            series,
            final_state: state,
            kicks_applied: report.kicks_applied,
            norm_drift: report.final_norm_drift,
            aliasing_flag: report.aliasing_flag,
            aborted: None,
            warn_kick,
        }),
        Err(err @ RotorError::AliasingLimit { .. }) => {
            let kicks_applied = match err {
                RotorError::AliasingLimit { kicks, .. } => kicks,
                _ => unreachable!(),
            };
            let norm_drift = (state.norm() - 1.0).abs();
            Ok(SingleRun {
                series,
                final_state: state,
                kicks_applied,
                norm_drift,
                aliasing_flag: true,
                aborted: Some(err.to_string()),
                warn_kick,
            })
        }
        Err(other) => Err(other),
    }
}

/// Momentum distribution averaged over every kick in `window` (inclusive).
pub fn averaged_distribution(
    params: &SystemParams<f64>,
    grid_n: usize,
    window: (u64, u64),
) -> Result<Vec<MomentumLine<f64>>> {
    let grid = AngularGrid::new(grid_n, params.hbar_value())?;
    let propagator = Propagator::new(&grid, params)?;
    let mut state = WaveState::even_initial(&grid);
    let mut accumulated = vec![0.0f64; grid_n];
    let mut count = 0usize;
    propagator.evolve(&mut state, window.1, |t, s| {
        if t >= window.0 {
            for (bin, amp) in s.amplitudes().iter().enumerate() {
                accumulated[bin] += amp.norm_sqr();
            }
            count += 1;
        }
    })?;
    let mut lines: Vec<MomentumLine<f64>> = accumulated
        .iter()
        .enumerate()
        .map(|(bin, total)| MomentumLine {
            index: grid.momentum_index(bin),
            momentum: grid.momentum(bin),
            probability: total / count.max(1) as f64,
        })
        .collect();
    lines.sort_by_key(|l| l.index);
    Ok(lines)
}

/// Quantum state snapshot after `kicks` periods, without per-kick recording.
pub fn state_after(
    params: &SystemParams<f64>,
    grid_n: usize,
    kicks: u64,
) -> Result<WaveState<f64>> {
    let grid = AngularGrid::new(grid_n, params.hbar_value())?;
    let propagator = Propagator::new(&grid, params)?;
    let mut state = WaveState::even_initial(&grid);
    propagator.evolve(&mut state, kicks, |_, _| {})?;
    if state.representation() != Representation::Angle {
        state = state.into_angle()?;
    }
    Ok(state)
}

/// Outcome of a co-evolved quantum/classical run.
pub struct HybridRun {
    pub quantum: SingleRun,
    pub classical: EnsembleSeries<f64>,
    pub ensemble: ClassicalEnsemble<f64>,
}

/// Co-evolves the quantum state with a fresh classical ensemble, tolerating
/// an aliasing abort the same way [`simulate`] does.
pub fn simulate_hybrid(
    params: &SystemParams<f64>,
    grid_n: usize,
    kicks: u64,
    n_max: usize,
    n_traj: usize,
    seed: u64,
) -> Result<HybridRun> {
    let grid = AngularGrid::new(grid_n, params.hbar_value())?;
    let mut state = WaveState::even_initial(&grid);
    let initial = state.momentum_view()?;
    let mut ensemble = ClassicalEnsemble::new(n_traj, seed);
    let mut classical = EnsembleSeries::new();
    let mut series = TimeSeries::with_capacity(kicks as usize + 1);
    series.record(0, &initial, &initial, params)?;
    let mut warn_kick = None;
    let result = hybrid_evolve(
        &mut state,
        params,
        kicks,
        n_max,
        &mut ensemble,
        &mut classical,
        |t, s| {
            if warn_kick.is_none() {
                if let Ok(outer) = s.outer_band_probability(0.1) {
                    if outer > 1e-8 {
                        warn_kick = Some(t);
                    }
                }
            }
            series
                .record(t, s, &initial, params)
                .expect("kick indices increase");
        },
    );
    let quantum = match result {
        Ok(report) => SingleRun {
            series,
            final_state: state,
            kicks_applied: report.kicks_applied,
            norm_drift: report.final_norm_drift,
            aliasing_flag: report.aliasing_flag,
            aborted: None,
            warn_kick,
        },
        Err(err @ RotorError::AliasingLimit { .. }) => {
            let kicks_applied = match err {
                RotorError::AliasingLimit { kicks, .. } => kicks,
                _ => unreachable!(),
            };
            let norm_drift = (state.norm() - 1.0).abs();
            SingleRun {
                series,
                final_state: state,
                kicks_applied,
                norm_drift,
                aliasing_flag: true,
                aborted: Some(err.to_string()),
                warn_kick,
            }
        }
        Err(other) => return Err(other),
    };
    // classical records may run one kick past the last clean quantum record
    classical.time.truncate(quantum.series.len());
    classical.p2_mean.truncate(quantum.series.len());
    Ok(HybridRun {
        quantum,
        classical,
        ensemble,
    })
}

/// Quadratic growth rates of the energy and the scrambling correlator over
/// the configured window.
pub fn fit_growth_rates(
    series: &TimeSeries<f64>,
    window: (u64, u64),
) -> Result<(FitResult<f64>, FitResult<f64>)> {
    let g = fit_quadratic_rate(&series.time, &series.p2_mean, window)?;
    let r = fit_quadratic_rate(&series.time, &series.otoc_var, window)?;
    Ok((g, r))
}

//! Prepared experiments: one scenario per figure-level data set, plus the
//! free-form `custom` run. Every scenario writes deterministic CSV data files
//! and a manifest listing them with checksums.

use rayon::prelude::*;

use ratchet_core::analytic::{gamma_theory, growth_rate_g, growth_rate_r};
use ratchet_core::fit::{
    detect_critical_time, fit_exponential_rate, fit_localization_length, time_averaged_energy,
    CriticalTimeOptions,
};
use ratchet_core::observables::quasienergy_spectrum;

use crate::config::{RunConfig, Scenario};
use crate::emit;
use crate::error::AppError;
use crate::manifest::{RunDiagnostics, RunManifest};
use crate::runner::{self, SingleRun};

/// Default quasienergy window (kicks) for the spectral runs.
pub const SPECTRUM_WINDOW: u64 = 4096;

/// Significance gate and cluster gap of the spectral peak counter.
pub const PEAK_THRESHOLD: f64 = 5.0;
pub const PEAK_GAP: usize = 16;

/// Localization-fit cases of the `fig4` scenario: phase (in turns) and the
/// `|p|` window of the exponential tail. The second case fits beyond the
/// structural shoulders that sit near `|p| ≈ 45`.
pub const LOCALIZATION_CASES: [(f64, (f64, f64)); 2] = [(0.05, (5.0, 70.0)), (0.2, (50.0, 110.0))];

/// Averaging span (kicks) of the distribution used for localization fits.
pub const LOCALIZATION_AVG_WINDOW: (u64, u64) = (250, 1000);

fn tag(x: f64) -> String {
    format!("{x:+.4}")
}

fn diagnostics(label: String, run: &SingleRun) -> RunDiagnostics {
    RunDiagnostics {
        label,
        kicks_applied: run.kicks_applied,
        norm_drift: run.norm_drift,
        aliasing_flag: run.aliasing_flag,
        aborted: run.aborted.clone(),
        tail_force_fraction: None,
    }
}

/// Runs the configured scenario. On any error the manifest is still written,
/// marked partial, before the error propagates.
pub fn run_scenario(config: &RunConfig) -> Result<RunManifest, AppError> {
    let mut manifest = RunManifest::begin(config.clone());
    let body = match config.scenario {
        Scenario::Fig1 => fig1(config, &mut manifest),
        Scenario::Fig2 => fig2(config, &mut manifest),
        Scenario::Fig3 => fig3(config, &mut manifest),
        Scenario::Fig4 => fig4(config, &mut manifest),
        Scenario::Appendix => appendix(config, &mut manifest),
        Scenario::Custom => custom(config, &mut manifest),
    };
    let manifest_path = config.output_dir.join("manifest.json");
    match body {
        Ok(()) => Ok(manifest.finish(&manifest_path)?),
        Err(error) => {
            manifest.mark_partial(error.to_string());
            let _ = manifest.finish(&manifest_path);
            Err(error)
        }
    }
}

/// Directed current at resonance: series and final distributions over the
/// ratchet phases and both signs of the asymmetry amplitude.
fn fig1(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let phi_fracs = [0.0, 0.125, 1.0 / 6.0, 0.25]; // φ = 0, π/4, π/3, π/2
    let alphas = [config.alpha, -config.alpha];
    let mut jobs = Vec::new();
    for &alpha in &alphas {
        for &phi_frac in &phi_fracs {
            jobs.push((alpha, phi_frac));
        }
    }
    let runs: Vec<(f64, f64, Result<SingleRun, AppError>)> = jobs
        .par_iter()
        .map(|&(alpha, phi_frac)| {
            let run = (|| {
                let mut params = config.system_params_with(phi_frac, config.g)?;
                params.ratchet_alpha = alpha;
                Ok(runner::simulate(&params, config.grid_n, config.kicks)?)
            })();
            (alpha, phi_frac, run)
        })
        .collect();
    for (alpha, phi_frac, run) in runs {
        let run = run?;
        let label = format!("alpha{}_phi{}", tag(alpha), tag(phi_frac));
        if let Some(abort) = &run.aborted {
            manifest.push_diagnostics(diagnostics(label.clone(), &run));
            return Err(AppError::Aborted(abort.clone()));
        }
        let dir = &config.output_dir;
        manifest.push_output(emit::emit_series(
            &run.series,
            &dir.join(format!("series_{label}.csv")),
        )?);
        manifest.push_output(emit::emit_distribution(
            &run.final_distribution().map_err(AppError::Numerical)?,
            &dir.join(format!("distribution_{label}.csv")),
        )?);
        manifest.push_diagnostics(diagnostics(label, &run));
    }
    Ok(())
}

/// Phase modulation of the quadratic growth rates at resonance: series for a
/// few interaction strengths plus the `G(φ)`/`R(φ)` scan with fitted and
/// predicted rates.
fn fig2(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let dir = &config.output_dir;
    // series at φ = π/4 for both asymmetry signs
    let series_g = [1.0, 5.0, 10.0];
    for &alpha in &[config.alpha, -config.alpha] {
        for &g in &series_g {
            let mut params = config.system_params_with(0.125, g)?;
            params.ratchet_alpha = alpha;
            let run = runner::simulate(&params, config.grid_n, config.kicks)?;
            let label = format!("alpha{}_g{}", tag(alpha), tag(g));
            if let Some(abort) = &run.aborted {
                manifest.push_diagnostics(diagnostics(label.clone(), &run));
                return Err(AppError::Aborted(abort.clone()));
            }
            manifest.push_output(emit::emit_series(
                &run.series,
                &dir.join(format!("series_{label}.csv")),
            )?);
            manifest.push_diagnostics(diagnostics(label, &run));
        }
    }

    // growth-rate scan over the Cartesian product of the configured lists
    let phis = config.phi_scan.clone().unwrap_or_else(|| vec![0.125]);
    let gs = config.g_scan.clone().unwrap_or_else(|| vec![config.g]);
    let mut points = Vec::new();
    for &phi_frac in &phis {
        for &g in &gs {
            points.push((phi_frac, g));
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let window = config.fit_window;
    let rows: Vec<Result<Vec<f64>, AppError>> = points
        .par_iter()
        .map(|&(phi_frac, g)| {
            let params = config.system_params_with(phi_frac, g)?;
            let run = runner::simulate(&params, config.grid_n, config.kicks)?;
            if let Some(abort) = run.aborted {
                return Err(AppError::Aborted(abort));
            }
            let (fit_g, fit_r) = runner::fit_growth_rates(&run.series, window)?;
            Ok(vec![
                phi_frac,
                g,
                fit_g.value,
                fit_g.stderr,
                fit_g.r_squared,
                growth_rate_g(&params),
                fit_r.value,
                fit_r.stderr,
                fit_r.r_squared,
                growth_rate_r(&params),
            ])
        })
        .collect();
    let rows: Result<Vec<Vec<f64>>, AppError> = rows.into_iter().collect();
    manifest.push_output(emit::emit_table(
        "phi_over_2pi,g,growth_g,growth_g_err,growth_g_r2,growth_g_pred,growth_r,growth_r_err,growth_r_r2,growth_r_pred",
        &rows?,
        &dir.join("rates.csv"),
    )?);
    Ok(())
}

/// Nonresonant energy growth: series over the interaction strengths and the
/// γ(g, ℏ) grid fitted past the critical time.
fn fig3(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let dir = &config.output_dir;
    let gs = config
        .g_scan
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.3, 0.5, 1.0, 2.0]);

    // series part at the configured ℏ
    let runs: Vec<(f64, Result<SingleRun, AppError>)> = gs
        .par_iter()
        .map(|&g| {
            let run = (|| {
                let params = config.system_params_with(config.phi_over_2pi, g)?;
                Ok(runner::simulate(&params, config.grid_n, config.kicks)?)
            })();
            (g, run)
        })
        .collect();
    for (g, run) in runs {
        let run = run?;
        let label = format!("g{}", tag(g));
        manifest.push_output(emit::emit_series(
            &run.series,
            &dir.join(format!("series_{label}.csv")),
        )?);
        manifest.push_diagnostics(diagnostics(label, &run));
    }

    // γ grid over the nonzero interactions and the standard ℏ ladder; the
    // momentum band in physical units shrinks with ℏ, so the grid grows to
    // keep an exponential-growth window open before the aliasing guard fires
    let hbars = [0.2, 0.5, 0.7, 1.0];
    let gamma_gs: Vec<f64> = gs.iter().copied().filter(|&g| g > 0.0).collect();
    let gamma_kicks = config.kicks.min(300);
    let mut grid_points = Vec::new();
    for &hbar in &hbars {
        for &g in &gamma_gs {
            grid_points.push((hbar, g));
        }
    }
    let rows: Vec<Result<Vec<f64>, AppError>> = grid_points
        .par_iter()
        .map(|&(hbar, g)| {
            let grid_n = grid_for_hbar(config.grid_n, hbar);
            let mut base_config = config.clone();
            base_config.hbar_eff = crate::config::HbarSpec::Value(hbar);
            let baseline_params = base_config.system_params_with(config.phi_over_2pi, 0.0)?;
            let baseline = runner::simulate(&baseline_params, grid_n, gamma_kicks)?;
            let params = base_config.system_params_with(config.phi_over_2pi, g)?;
            let run = runner::simulate(&params, grid_n, gamma_kicks)?;
            let (t_c, gamma_fit, gamma_err, gamma_r2) =
                gamma_from_series(&run, &baseline.series.p2_mean);
            Ok(vec![
                hbar,
                g,
                t_c,
                gamma_fit,
                gamma_err,
                gamma_r2,
                gamma_theory(g, hbar),
            ])
        })
        .collect();
    let rows: Result<Vec<Vec<f64>>, AppError> = rows.into_iter().collect();
    manifest.push_output(emit::emit_table(
        "hbar_eff,g,t_c,gamma_fit,gamma_err,gamma_r2,gamma_theory",
        &rows?,
        &dir.join("gamma.csv"),
    )?);
    Ok(())
}

/// Doubles the grid per halving of ℏ below 1, keeping the momentum band at a
/// comparable physical width.
fn grid_for_hbar(base_n: usize, hbar: f64) -> usize {
    let mut n = base_n;
    let mut reach = hbar;
    while reach < 0.99 {
        n *= 2;
        reach *= 2.0;
    }
    n
}

/// Critical time and exponential rate of one nonresonant run, fitted between
/// the departure from the baseline plateau and the aliasing-guard horizon.
///
/// The window opens five kicks past the critical time; when the growth fills
/// the band too fast for that margin, it falls back to one kick (the fit
/// window in the result shows which was used). Returns NaNs when the series
/// never departs or no window exists at all.
pub fn gamma_from_series(run: &SingleRun, baseline_p2: &[f64]) -> (f64, f64, f64, f64) {
    let options = CriticalTimeOptions::default();
    let t_c = match detect_critical_time(
        &run.series.time,
        &run.series.p2_mean,
        baseline_p2,
        &options,
    ) {
        Ok(Some(fit)) => fit.value,
        _ => return (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
    };
    let hi = run.valid_horizon();
    for margin in [5u64, 1] {
        let lo = t_c as u64 + margin;
        if hi < lo + 2 {
            continue;
        }
        if let Ok(fit) = fit_exponential_rate(&run.series.time, &run.series.p2_mean, (lo, hi)) {
            return (t_c, fit.value, fit.stderr, fit.r_squared);
        }
    }
    (t_c, f64::NAN, f64::NAN, f64::NAN)
}

/// Phase-controlled dynamical localization: long series, the time-averaged
/// energy scan over the phase, tail distributions with localization-length
/// fits, and the quasienergy spectra.
fn fig4(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let dir = &config.output_dir;

    // (a) series for the three canonical phases
    let series_phis = [0.05, 0.2, 0.25];
    let runs: Vec<(f64, Result<SingleRun, AppError>)> = series_phis
        .par_iter()
        .map(|&phi_frac| {
            let run = (|| {
                let params = config.system_params_with(phi_frac, config.g)?;
                Ok(runner::simulate(&params, config.grid_n, config.kicks)?)
            })();
            (phi_frac, run)
        })
        .collect();
    for (phi_frac, run) in runs {
        let run = run?;
        let label = format!("phi{}", tag(phi_frac));
        manifest.push_output(emit::emit_series(
            &run.series,
            &dir.join(format!("series_{label}.csv")),
        )?);
        manifest.push_diagnostics(diagnostics(label, &run));
    }

    // (b) time-averaged energy over the phase scan
    let phis = config
        .phi_scan
        .clone()
        .unwrap_or_else(|| (0..=20).map(|i| i as f64 * 0.025).collect());
    let avg_window = config.avg_window;
    let rows: Vec<Result<Vec<f64>, AppError>> = phis
        .par_iter()
        .map(|&phi_frac| {
            let params = config.system_params_with(phi_frac, config.g)?;
            let run = runner::simulate(&params, config.grid_n, config.kicks)?;
            let avg = time_averaged_energy(&run.series.time, &run.series.p2_mean, avg_window)?;
            Ok(vec![phi_frac, avg])
        })
        .collect();
    let rows: Result<Vec<Vec<f64>>, AppError> = rows.into_iter().collect();
    manifest.push_output(emit::emit_table(
        "phi_over_2pi,p2_time_avg",
        &rows?,
        &dir.join("phase_scan.csv"),
    )?);

    // (c) instantaneous snapshot distributions, the averaged
    // distribution, and the tail fits
    let mut fit_rows = Vec::new();
    for (phi_frac, window) in LOCALIZATION_CASES {
        let params = config.system_params_with(phi_frac, config.g)?;
        for snapshot in [250u64, 500] {
            let state = runner::state_after(&params, config.grid_n, snapshot)?;
            let dist =
                ratchet_core::observables::momentum_distribution(&state).map_err(AppError::Numerical)?;
            manifest.push_output(emit::emit_distribution(
                &dist,
                &dir.join(format!("distribution_phi{}_t{snapshot}.csv", tag(phi_frac))),
            )?);
        }
        let averaged =
            runner::averaged_distribution(&params, config.grid_n, LOCALIZATION_AVG_WINDOW)?;
        manifest.push_output(emit::emit_distribution(
            &averaged,
            &dir.join(format!("distribution_phi{}_avg.csv", tag(phi_frac))),
        )?);
        let fit = fit_localization_length(&averaged, window, params.hbar_value())
            .map_err(AppError::Numerical)?;
        fit_rows.push(vec![
            phi_frac,
            fit.window.0,
            fit.window.1,
            fit.value,
            fit.stderr,
            fit.r_squared,
        ]);
    }
    manifest.push_output(emit::emit_table(
        "phi_over_2pi,window_lo,window_hi,xi,xi_err,r2",
        &fit_rows,
        &dir.join("localization.csv"),
    )?);

    // (d) quasienergy spectra from the autocorrelation window
    let mut peak_rows = Vec::new();
    for &phi_frac in &[0.05, 0.2] {
        let params = config.system_params_with(phi_frac, config.g)?;
        let run = runner::simulate(&params, config.grid_n, SPECTRUM_WINDOW)?;
        if let Some(abort) = run.aborted {
            return Err(AppError::Aborted(abort));
        }
        let spectrum = quasienergy_spectrum(&run.series.autocorr[..SPECTRUM_WINDOW as usize])
            .map_err(AppError::Numerical)?;
        manifest.push_output(emit::emit_spectrum(
            &spectrum,
            &dir.join(format!("spectrum_phi{}.csv", tag(phi_frac))),
        )?);
        let peaks = spectrum.peaks(PEAK_THRESHOLD, PEAK_GAP);
        for peak in &peaks {
            peak_rows.push(vec![
                phi_frac,
                peaks.len() as f64,
                peak.bin as f64,
                spectrum.epsilon[peak.bin],
                peak.weight,
            ]);
        }
    }
    manifest.push_output(emit::emit_table(
        "phi_over_2pi,n_peaks,bin,epsilon,weight",
        &peak_rows,
        &dir.join("spectral_peaks.csv"),
    )?);
    Ok(())
}

/// Classical limit: co-evolved quantum and ensemble energies, exponential
/// rates of both, and the phase-space portrait.
fn appendix(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let dir = &config.output_dir;
    let gs = config.g_scan.clone().unwrap_or_else(|| vec![config.g]);
    let mut rate_rows = Vec::new();
    for &g in &gs {
        let params = config.system_params_with(config.phi_over_2pi, g)?;
        let hybrid = runner::simulate_hybrid(
            &params,
            config.grid_n,
            config.kicks,
            config.n_max,
            config.n_traj,
            config.seed,
        )?;
        let label = format!("g{}", tag(g));
        manifest.push_output(emit::emit_series(
            &hybrid.quantum.series,
            &dir.join(format!("series_quantum_{label}.csv")),
        )?);
        let classical_rows: Vec<Vec<f64>> = hybrid
            .classical
            .time
            .iter()
            .zip(&hybrid.classical.p2_mean)
            .map(|(&t, &p2)| vec![t as f64, p2])
            .collect();
        manifest.push_output(emit::emit_table(
            "t,p2_mean_cl",
            &classical_rows,
            &dir.join(format!("series_classical_{label}.csv")),
        )?);

        let hi = hybrid.quantum.valid_horizon();
        let fit_window = (3u64, hi);
        let quantum_rate = fit_exponential_rate(
            &hybrid.quantum.series.time,
            &hybrid.quantum.series.p2_mean,
            fit_window,
        );
        let classical_rate = fit_exponential_rate(
            &hybrid.classical.time,
            &hybrid.classical.p2_mean,
            fit_window,
        );
        let (gq, gq_r2) = quantum_rate
            .map(|f| (f.value, f.r_squared))
            .unwrap_or((f64::NAN, f64::NAN));
        let (gc, gc_r2) = classical_rate
            .map(|f| (f.value, f.r_squared))
            .unwrap_or((f64::NAN, f64::NAN));
        rate_rows.push(vec![
            g,
            gq,
            gq_r2,
            gc,
            gc_r2,
            gamma_theory(g, params.hbar_value()),
            hybrid.classical.max_tail_force_fraction,
        ]);
        let mut diag = diagnostics(label.clone(), &hybrid.quantum);
        diag.tail_force_fraction = Some(hybrid.classical.max_tail_force_fraction);
        manifest.push_diagnostics(diag);

        // portrait snapshot after 10 kicks, reproduced deterministically
        let snapshot = runner::simulate_hybrid(
            &params,
            config.grid_n,
            10,
            config.n_max,
            config.n_traj,
            config.seed,
        )?;
        manifest.push_output(emit::emit_portrait(
            &snapshot.ensemble.phase_portrait(),
            &dir.join(format!("portrait_{label}_t10.csv")),
        )?);
    }
    manifest.push_output(emit::emit_table(
        "g,gamma_quantum,gamma_quantum_r2,gamma_classical,gamma_classical_r2,gamma_theory,tail_force_fraction_max",
        &rate_rows,
        &dir.join("rates.csv"),
    )?);
    Ok(())
}

/// One run with exactly the configured parameters.
fn custom(config: &RunConfig, manifest: &mut RunManifest) -> Result<(), AppError> {
    let dir = &config.output_dir;
    let params = config.system_params()?;
    let run = runner::simulate(&params, config.grid_n, config.kicks)?;
    manifest.push_output(emit::emit_series(&run.series, &dir.join("series.csv"))?);
    manifest.push_output(emit::emit_distribution(
        &run.final_distribution().map_err(AppError::Numerical)?,
        &dir.join("distribution.csv"),
    )?);
    manifest.push_diagnostics(diagnostics("custom".into(), &run));
    if let Some(abort) = run.aborted {
        return Err(AppError::Aborted(abort));
    }
    Ok(())
}

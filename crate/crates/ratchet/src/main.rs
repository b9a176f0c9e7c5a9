use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ratchet::config::{parse_config_file, parse_list, parse_window, ConfigOverlay, HbarSpec, RunConfig, Scenario};
use ratchet::{run_scenario, run_sweep, AppError};

/// Kicked ratchet rotor simulations: exact spectral propagation, figure-level
/// scenario data sets, parameter sweeps, and a law-vs-simulation verifier.
#[derive(Parser)]
#[command(name = "ratchet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (fig1|fig2|fig3|fig4|appendix|custom).
    Run(RunArgs),
    /// Run the Cartesian product of the configured scan lists.
    Sweep(RunArgs),
    /// Check the closed-form laws against the quadrature oracle and the
    /// spectral simulation over randomized resonant parameters.
    Verify {
        /// Seed of the randomized parameter tuples.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

/// Every config-file key is also a flag of the same name; flags win over the
/// file, the file wins over scenario defaults.
#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi_over_2pi: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    /// Effective Planck constant: `4pi` (resonant) or a number.
    #[arg(long)]
    hbar_eff: Option<HbarSpec>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    kicks: Option<u64>,
    /// Comma-separated phase scan (in units of 2π).
    #[arg(long)]
    phi_scan: Option<String>,
    /// Comma-separated interaction-strength scan.
    #[arg(long)]
    g_scan: Option<String>,
    #[arg(long)]
    n_traj: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Time-average window `lo,hi` (kicks).
    #[arg(long)]
    avg_window: Option<String>,
    /// Quadratic-fit window `lo,hi` (kicks).
    #[arg(long)]
    fit_window: Option<String>,
}

impl RunArgs {
    fn overlay(&self) -> Result<ConfigOverlay, AppError> {
        Ok(ConfigOverlay {
            scenario: self.scenario,
            k: self.k,
            alpha: self.alpha,
            phi_over_2pi: self.phi_over_2pi,
            g: self.g,
            hbar_eff: self.hbar_eff,
            epsilon: self.epsilon,
            grid_n: self.grid_n,
            kicks: self.kicks,
            phi_scan: self
                .phi_scan
                .as_deref()
                .map(|s| parse_list("phi_scan", s))
                .transpose()?,
            g_scan: self
                .g_scan
                .as_deref()
                .map(|s| parse_list("g_scan", s))
                .transpose()?,
            n_traj: self.n_traj,
            n_max: self.n_max,
            seed: self.seed,
            output_dir: self.output_dir.clone(),
            avg_window: self
                .avg_window
                .as_deref()
                .map(|s| parse_window("avg_window", s))
                .transpose()?,
            fit_window: self
                .fit_window
                .as_deref()
                .map(|s| parse_window("fit_window", s))
                .transpose()?,
        })
    }

    fn resolve(&self) -> Result<RunConfig, AppError> {
        let file_overlay = self
            .config
            .as_deref()
            .map(parse_config_file)
            .transpose()?;
        let cli_overlay = self.overlay()?;
        Ok(RunConfig::resolve(file_overlay.as_ref(), &cli_overlay)?)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args.resolve().and_then(|config| {
            let manifest = run_scenario(&config)?;
            println!(
                "scenario {} complete: {} data files in {}",
                config.scenario.name(),
                manifest.outputs.len(),
                config.output_dir.display()
            );
            Ok(())
        }),
        Command::Sweep(args) => args.resolve().and_then(|config| {
            let manifest = run_sweep(&config)?;
            println!(
                "sweep complete: {} data files in {}",
                manifest.outputs.len(),
                config.output_dir.display()
            );
            Ok(())
        }),
        Command::Verify { seed } => {
            ratchet::verify::run_verify(seed, std::io::stdout()).and_then(|report| {
                println!(
                    "verify: {}/{} tuples within {:e} (worst relative error {:.3e})",
                    report.tuples - report.failures,
                    report.tuples,
                    ratchet::verify::VERIFY_TOLERANCE,
                    report.worst_relative_error
                );
                if report.failures > 0 {
                    Err(AppError::Aborted(format!(
                        "{} of {} verification tuples disagree",
                        report.failures, report.tuples
                    )))
                } else {
                    Ok(())
                }
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

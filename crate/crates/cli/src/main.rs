use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use twonorm_cli::{run_blowup_scan, run_solve, run_sweep, ExitStatus, RunConfig};

/// Two-norm Picard solver: solves, refinement sweeps and blow-up scans.
#[derive(Parser)]
#[command(name = "twonorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configured problem (exit 0 horizon, 2 blow-up, 3 budget, 1 error).
    Solve { config: PathBuf },
    /// Refinement study against the instance's oracle.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Blow-up estimate per initial-data amplitude.
    Blowup {
        config: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        amplitudes: Vec<f64>,
    },
}

fn load(path: &Path) -> anyhow::Result<RunConfig> {
    RunConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<ExitStatus> {
    match cli.command {
        Command::Solve { config } => {
            let cfg = load(&config)?;
            let out = run_solve(&cfg)?;
            println!(
                "{}: {:?} at t = {} after {} windows -> {}",
                cfg.instance.name(),
                out.report.termination,
                out.report.final_time,
                out.report.windows.len(),
                out.output_dir.display()
            );
            Ok(out.status)
        }
        Command::Sweep { config, levels } => {
            let cfg = load(&config)?;
            let out = run_sweep(&cfg, levels)?;
            for row in &out.rows {
                println!(
                    "level {}: error {:e}, order {:?}",
                    row.level, row.error, row.observed_order
                );
            }
            Ok(ExitStatus::HorizonReached)
        }
        Command::Blowup { config, amplitudes } => {
            let cfg = load(&config)?;
            let out = run_blowup_scan(&cfg, &amplitudes)?;
            for row in &out.rows {
                println!(
                    "amplitude {}: t_c {:?}, oracle {:?}",
                    row.amplitude, row.t_c_estimate, row.oracle_t_star
                );
            }
            Ok(ExitStatus::HorizonReached)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status.code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ExitStatus::Error.code() as u8)
        }
    }
}

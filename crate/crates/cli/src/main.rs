//! `quadpencil`: spectral checks for damped quadratic pencils, driven by JSON
//! problem files.
//!
//! Exit codes: 0 all checks pass, 1 a checked property fails, 2 bad input,
//! 3 numerical failure.

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::ProblemConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "quadpencil", version, about = "Spectral checks for damped quadratic pencils")]
struct Cli {
    /// Overrides every seed in the config files.
    #[arg(long, env = "QUADPENCIL_SEED", global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full spectrum of the linearization with structure and region checks.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Real eigenvalues in (α, 0] by inertia counting, with min-max checks.
    Variational {
        config: PathBuf,
        /// Left end of the interval; must not lie left of the α estimate.
        #[arg(long, allow_hyphen_values = true)]
        delta_lower: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares eigenvalues of two pencils whose forms are ordered.
    Interlace {
        config_a: PathBuf,
        config_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy trace of the trapezoidal time stepper as CSV.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        t_final: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Beam eigenvalues against their closed-form bounds.
    BeamReport {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<ProblemConfig, CliError> {
    let mut cfg = ProblemConfig::load(path)?;
    if let Some(s) = seed {
        cfg.override_seed(s);
    }
    Ok(cfg)
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|source| CliError::Output { path: path.display().to_string(), source })?,
        None => print!("{}", outcome.text),
    }
    eprintln!("{} [{}]", outcome.summary, if outcome.passed { "pass" } else { "FAIL" });
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let seed = cli.seed;
    let (outcome, out) = match cli.command {
        Command::Spectrum { config, out } => (commands::spectrum(&load(&config, seed)?)?, out),
        Command::Variational { config, delta_lower, out } => (commands::variational(&load(&config, seed)?, delta_lower)?, out),
        Command::Interlace { config_a, config_b, out } => {
            (commands::interlace(&load(&config_a, seed)?, &load(&config_b, seed)?)?, out)
        }
        Command::Simulate { config, t_final, dt, out } => (commands::simulate_trace(&load(&config, seed)?, t_final, dt)?, out),
        Command::BeamReport { config, out } => (commands::beam_report(&load(&config, seed)?)?, out),
    };
    emit(&outcome, out.as_deref())?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("quadpencil: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

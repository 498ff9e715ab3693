//! `spectral-curve`: batch driver for the spectral-curve library.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 configuration error,
//! 3 partial numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::JobConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// How a command finished when it did not hit an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    InvariantFailure,
    PartialFailure,
}

#[derive(Debug, Parser)]
#[command(name = "spectral-curve", version, about = "Spectral curves of the Cauchy-Riemann problem on punctured tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path; overrides `output.path`. Standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random punctures and verification samples; overrides `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tabulate sigma, zeta, p or phi at the configured points.
    Eval,
    /// Characteristic polynomials, sheets and multipliers over the grid.
    Curve,
    /// The degenerate beta polynomial, its roots and coefficient vectors.
    Beta,
    /// Loop permutations and the sheet structure at alpha = 0.
    Monodromy,
    /// Run the invariant suite.
    Verify,
    /// Integrate the Weierstrass data and export a mesh.
    Surface,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut cfg = JobConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let out = cli.out.or_else(|| cfg.output.path.clone().map(PathBuf::from));
    let ctx = commands::Context { cfg, out };
    match cli.command {
        Command::Eval => commands::eval::run(&ctx),
        Command::Curve => commands::curve::run(&ctx),
        Command::Beta => commands::beta::run(&ctx),
        Command::Monodromy => commands::monodromy::run(&ctx),
        Command::Verify => commands::verify::run(&ctx),
        Command::Surface => commands::surface::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::InvariantFailure) => ExitCode::from(1),
        Ok(Outcome::PartialFailure) => ExitCode::from(3),
        Err(e) => {
            eprintln!("spectral-curve: {e}");
            match e {
                CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
                CliError::Numerical(_) => ExitCode::from(3),
            }
        }
    }
}

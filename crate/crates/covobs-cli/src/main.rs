mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::{CliError, Ctx};
use config::Config;
use std::path::PathBuf;
use std::process::ExitCode;

/// Covariant-observable certification runs driven by a flat key=value
/// config file; command-line flags override file values.
#[derive(Parser)]
#[command(name = "covobs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file (key = value lines, # comments)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// RNG seed for randomized runs
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Grid size (power of two)
    #[arg(long, global = true)]
    grid_n: Option<usize>,

    /// Grid length (symmetric about zero)
    #[arg(long, global = true)]
    grid_length: Option<f64>,

    /// Tolerance for resolution searches
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Outcome distribution of a smeared observable on a probe state
    Distribution,
    /// Limit of resolution of a smearing measure
    Resolution,
    /// Position-momentum resolution product against the sharp bound
    Bound,
    /// Distinction-order comparison of two smearing measures
    Distinction,
    /// Rotation-covariance sampling check for an isotropic 3D smearing
    R3,
    /// Translation/boost covariance battery for 1D observables
    Battery,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::empty(),
    };
    if let Some(v) = &cli.out {
        cfg.set("out", v.display().to_string());
    }
    if let Some(v) = cli.seed {
        cfg.set("seed", v.to_string());
    }
    if let Some(v) = cli.grid_n {
        cfg.set("grid_n", v.to_string());
    }
    if let Some(v) = cli.grid_length {
        cfg.set("grid_length", v.to_string());
    }
    if let Some(v) = cli.tol {
        cfg.set("tol", v.to_string());
    }
    let ctx = Ctx::from_config(&cfg)?;
    match cli.command {
        Command::Distribution => commands::distribution(&ctx, &cfg),
        Command::Resolution => commands::resolution(&ctx, &cfg),
        Command::Bound => commands::bound(&ctx, &cfg),
        Command::Distinction => commands::distinction(&ctx, &cfg),
        Command::R3 => commands::r3(&ctx, &cfg),
        Command::Battery => commands::battery(&ctx, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("certification failed (see reports)");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

//! Command-line driver for the two-phase Stokes capillarity engine.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "stokes2p",
    about = "Boundary-integral simulation of two-phase Stokes flow driven by capillarity",
    version
)]
struct Cli {
    /// Structured TOML run configuration; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for tables, records and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Seed for probe vectors (overrides the config value).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Multiplies every verify tolerance (0 makes all bounded checks fail).
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,

    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    print_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the interface evolution and write the trajectory.
    Simulate,
    /// Run the full invariant suite; exit status reflects the outcome.
    Verify,
    /// Scan a layer potential on a rectangle of off-interface points.
    Fields,
    /// Resolvent scan: smallest singular value of lambda - D(f) per grid size.
    Spectrum,
    /// Flat-state symbol and Frechet-derivative cross-checks.
    Linearize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_defaults {
        print!("{}", RunConfig::default().to_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: missing command (simulate|verify|fields|spectrum|linearize); see --help");
        return ExitCode::FAILURE;
    };
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::FAILURE;
            }
        },
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let result = match command {
        Command::Simulate => commands::cmd_simulate(&cfg, &cli.out),
        Command::Fields => commands::cmd_fields(&cfg, &cli.out),
        Command::Spectrum => commands::cmd_spectrum(&cfg, &cli.out),
        Command::Linearize => commands::cmd_linearize(&cfg, &cli.out),
        Command::Verify => {
            match commands::cmd_verify(&cfg, &cli.out, cfg.seed, cli.tolerance_scale) {
                Ok(true) => Ok(()),
                Ok(false) => {
                    eprintln!("error: verification checks failed");
                    return ExitCode::FAILURE;
                }
                Err(e) => Err(e),
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

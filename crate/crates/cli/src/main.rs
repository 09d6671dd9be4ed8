//! `karman <subcommand> --config <path> [--out <dir>]`
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 convergence
//! failure, 4 failed internal check.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::RunConfig;
use error::CliError;
use output::OutDir;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "karman", version, about = "Translating vortex-patch streets for Euler, QGSW and gSQG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Subcommand)]
enum Command {
    /// Point-street speed: closed form and lattice sums.
    PointSpeed(Args),
    /// Continue the patch street to `solve.eps` and write the solution.
    SolveStreet(Args),
    /// Continue the branch and report V(eps) and its limit order.
    SweepEpsilon(Args),
    /// Solve, then evolve the street by contour dynamics.
    EvolvePatch(Args),
    /// RK4 point-vortex runs: a pair, a truncated street or a row.
    SimulatePoints(Args),
    /// Finite-difference Jacobian at the point-vortex limit.
    LinCheck(Args),
    /// K0 and K1 against their integral representation.
    BesselCheck(Args),
    /// Street velocity on a rectangular grid.
    SampleField(Args),
}

#[derive(Clone, clap::Args)]
struct Args {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    use Command::*;
    let (args, name) = match &command {
        PointSpeed(a) => (a, "point-speed"),
        SolveStreet(a) => (a, "solve-street"),
        SweepEpsilon(a) => (a, "sweep-epsilon"),
        EvolvePatch(a) => (a, "evolve-patch"),
        SimulatePoints(a) => (a, "simulate-points"),
        LinCheck(a) => (a, "lin-check"),
        BesselCheck(a) => (a, "bessel-check"),
        SampleField(a) => (a, "sample-field"),
    };
    let cfg = RunConfig::load(&args.config)?;
    karman_core::exec::init_threads(cfg.threads);
    let out = OutDir::create(args.out.as_deref().unwrap_or(Path::new("karman-out")))?;
    out.write_text(&format!("{name}.config.toml"), &cfg.resolved())?;
    let checks = match command {
        PointSpeed(_) => commands::point_speed(&cfg, &out),
        SolveStreet(_) => commands::solve_street(&cfg, &out),
        SweepEpsilon(_) => commands::sweep_epsilon(&cfg, &out),
        EvolvePatch(_) => commands::evolve_patch(&cfg, &out),
        SimulatePoints(_) => commands::simulate_points(&cfg, &out),
        LinCheck(_) => commands::lin_check(&cfg, &out),
        BesselCheck(_) => commands::bessel_check(&cfg, &out),
        SampleField(_) => commands::sample_field(&cfg, &out),
    }?;
    checks.print();
    checks.into_result()
}

// `!(x > 0.0)` is used on purpose so NaN is rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod export;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use crate::export::DirLock;
use crate::run::Command;

/// Obstacle problem with the geodesic distance as obstacle on closed surfaces:
/// solve, detect the cut locus, certify barriers, probe Laplacian blow-up,
/// and build the smoothed obstacle.
#[derive(Debug, Parser)]
#[command(name = "cutloc", version, after_long_help = config::REFERENCE)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Run configuration (see --help for the format and defaults).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for VTK/CSV fields and report.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a config key, e.g. `--override solver.omega=1.2` (repeatable).
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn real_main(cli: Cli) -> Result<bool> {
    let cfg = config::parse_config(&cli.config, &cli.overrides)?;
    let _lock = DirLock::acquire(&cli.out)?;
    run::run(cli.command, cfg, &cli.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

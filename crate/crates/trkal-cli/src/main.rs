// `!(x > 0)`-style guards reject NaN as well as the out-of-range value.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! `trkal` — scenario-driven runner for the flow laboratory.
//!
//! One subcommand per analysis; every run reads a single JSON scenario,
//! writes its artifacts plus a manifest into `--out`, and exits 0 (ok),
//! 2 (validation failure) or 3 (runtime failure).

mod commands;
mod output;
mod scenario;

use clap::Parser;
use output::OutputDir;
use scenario::{load_scenario, CliError};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "trkal",
    version,
    about = "Beltrami-triplet flow laboratory: tracing, topology, phase instability, vorticity strings and a spectral validator"
)]
struct Cli {
    /// Analysis to run.
    #[arg(value_parser = [
        "triplet", "trace", "topology", "phase", "latetime", "vorticity", "validate",
    ])]
    subcommand: String,

    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,

    /// Output directory (created if missing; locked during the run).
    #[arg(long)]
    out: PathBuf,

    /// Override a scenario field by dotted path, e.g. --set phase.dt=0.005.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Worker threads for the data-parallel inner loops.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}

fn run(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            let (kind, code) = match &err {
                CliError::Validation(_) => ("validation", 2),
                CliError::Runtime(_) => ("runtime", 3),
            };
            let report = serde_json::json!({
                "error": kind,
                "message": err.to_string(),
            });
            eprintln!("{report}");
            code
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&cli.scenario).map_err(|e| {
        CliError::validation(format!("reading {}: {e}", cli.scenario.display()))
    })?;
    let loaded = load_scenario(&text, &cli.sets)?;
    let mut out = OutputDir::acquire(&cli.out)?;
    let outcome = commands::run(&cli.subcommand, &loaded, &mut out)?;
    Ok(outcome.exit_code)
}

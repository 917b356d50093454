use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lipbandit_cli::{analyze_dir, bound_reports, dimension_estimate, parse_config, run_experiment, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "lipbandit", version, about = "Instance-adaptive Lipschitz bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (horizon, seed) pair of a config and write traces, summary and manifest.
    Run {
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
    },
    /// Verify an output directory against its manifest and refit the exponent.
    Analyze { dir: PathBuf },
    /// Integrals, k_T and packing sums for each horizon, without simulating.
    Bound { config: PathBuf },
    /// Covering-based estimates of d_z and d★.
    Dims { config: PathBuf },
}

fn load(path: &PathBuf) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{}", serde_json::to_string_pretty(v)?) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, workers, out, seed_offset } => {
            let cfg = load(&config)?;
            let outcome = run_experiment(&cfg, &RunOptions { workers, seed_offset, out })?;
            eprintln!("wrote {} files to {}", outcome.manifest.files.len() + 1, outcome.dir.display());
            print_json(&outcome.summary.curve)
        }
        Command::Analyze { dir } => print_json(&analyze_dir(&dir)?),
        Command::Bound { config } => print_json(&bound_reports(&load(&config)?)?),
        Command::Dims { config } => print_json(&dimension_estimate(&load(&config)?)??),
    }
}

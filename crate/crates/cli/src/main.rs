use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thzlink_cli::commands;
use thzlink_cli::{CliError, CliResult, Engine};
use thzlink_core::analytic::Formulas;

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Outage probability versus P/σ² for each threshold.
    Outage,
    /// Average end-to-end SNR versus P/σ².
    AvgSnr,
    /// Spectral efficiency and rate versus P/σ².
    Capacity,
    /// Run the invariant suite.
    Validate,
    /// Write all three tables and a summary of the headline comparisons.
    ReproducePaper,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Flat dotted-key JSON config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Evaluate the closed forms exactly as typeset.
    #[arg(long, global = true)]
    strict_paper_formulas: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "thzlink",
    version,
    about = "THz-RF decode-and-forward relay performance sweeps"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("THZLINK_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "THZLINK_THREADS must be a positive integer (got {v:?})"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(args: Args) -> CliResult<String> {
    init_threads()?;
    let c = &args.common;
    let out = c
        .out
        .clone()
        .ok_or_else(|| CliError::Config("--out is required".into()))?;
    let config =
        commands::load_config(c.config.as_deref())?.with_mc_overrides(c.seed, c.samples)?;
    let formulas = if c.strict_paper_formulas {
        Formulas::Printed
    } else {
        Formulas::Derived
    };
    let engine = Engine::new(config, formulas)?;
    match args.command {
        Command::Outage => commands::outage(&engine, &out),
        Command::AvgSnr => commands::avg_snr(&engine, &out),
        Command::Capacity => commands::capacity(&engine, &out),
        Command::Validate => commands::validate(&engine, &out),
        Command::ReproducePaper => commands::reproduce_paper(&engine, &out),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(report) => {
            print!("{report}");
            if !report.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thzlink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

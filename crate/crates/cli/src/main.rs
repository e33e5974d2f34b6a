//! `bfree`: densities, Mirsky cylinders, entropy, sieve windows, zero-window
//! scans, fibers and prime factorization tables from a JSON config.
//!
//! Exit codes: 0 success, 1 other failure (including a failed selfcheck),
//! 2 config error, 3 budget or overflow, 4 cache mismatch.

mod commands;
mod config;
mod error;
mod report;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::json;

use config::{RunConfig, Setup};
use error::CliError;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    /// Density of B-free elements, exact with tail interval, and empirically on a region
    Density,
    /// Mirsky cylinder measures against frequencies in the sieve window
    Cylinder,
    /// Entropy formula and exact admissible counts on boxes
    Entropy,
    /// Sieve window generation, optionally cached
    Sieve,
    /// All-zero windows in the sieve
    Scan,
    /// Missed-class map and joining fibers of the sieve window
    Fibers,
    /// Prime ideal factorization of rational primes
    Factor,
    /// Seeded invariant suites
    Selfcheck,
}

#[derive(Parser, Debug)]
#[command(name = "bfree", version, about = "B-free elements of number fields")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Directory for reports
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Directory holding the cached sieve window
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Seed for randomized suites; overrides the config
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    }
    let start = Instant::now();
    let setup = Setup::new(config)?;
    let cache = cli.cache.as_deref();
    let mut report = match cli.command {
        Command::Density => commands::density_cmd(&setup, cache)?,
        Command::Cylinder => commands::cylinder_cmd(&setup, cache)?,
        Command::Entropy => commands::entropy_cmd(&setup)?,
        Command::Sieve => commands::sieve_cmd(&setup, cache)?,
        Command::Scan => commands::scan_cmd(&setup, cache)?,
        Command::Fibers => commands::fibers_cmd(&setup, cache)?,
        Command::Factor => commands::factor_cmd(&setup)?,
        Command::Selfcheck => selfcheck::selfcheck_cmd(&setup)?,
    };
    report.run.insert("seconds".into(), json!(start.elapsed().as_secs_f64()));
    report.run.insert("threads".into(), json!(rayon::current_num_threads()));
    for path in report.write(&cli.out, &setup.config, setup.seed)? {
        println!("{}", path.display());
    }
    if report.results.get("passed") == Some(&json!(false)) {
        return Err(CliError::Other("selfcheck failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bfree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

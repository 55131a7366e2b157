//! quadbell: deterministic Monte Carlo experiments on a local-hidden-
//! variable model of quadrature Bell tests, validated against closed-form
//! Gaussian moments.
//!
//! Exit codes: 0 success, 1 analysis or validation failure, 2 usage or
//! configuration error. Data outputs are a pure function of the resolved
//! configuration (seed included) at any worker count; set QUADBELL_WORKERS
//! to override the worker pool size.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod format;

use commands::Failure;
use config::{ExperimentConfig, Overrides};

const WORKERS_ENV: &str = "QUADBELL_WORKERS";

#[derive(Parser)]
#[command(
    name = "quadbell",
    version,
    about = "Local-hidden-variable quadrature Bell-test simulator",
    after_help = "Config files hold `key = value` lines with the same names as the flags\n\
                  (chi, chi_grid, angles, representation, samples, seed, chunks,\n\
                  epsilon, out_csv, out_json, dump_cap). Flags override file entries.\n\
                  Angles are radians unless suffixed with `deg`."
)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare simulation against the exact oracle; exit 0 iff all rows pass.
    Validate,
    /// Estimate the CHSH parameter S over the chi grid.
    Bell,
    /// Measure negative-count-rate fractions.
    Positivity,
    /// Sweep chi: S plus negative fractions per grid point.
    Sweep,
    /// Dump raw hidden variables and derived realities as CSV.
    SampleDump,
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let file_text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|err| {
            Failure::Usage(format!("cannot read config {}: {err}", path.display()))
        })?),
        None => None,
    };
    ExperimentConfig::resolve(file_text.as_deref(), &cli.overrides).map_err(Failure::Usage)
}

fn dispatch(command: &Command, cfg: &ExperimentConfig) -> Result<bool, Failure> {
    match command {
        Command::Validate => commands::validate::run(cfg),
        Command::Bell => commands::bell::run(cfg).map(|()| true),
        Command::Positivity => commands::positivity::run(cfg).map(|()| true),
        Command::Sweep => commands::sweep::run(cfg).map(|()| true),
        Command::SampleDump => commands::sample_dump::run(cfg).map(|()| true),
    }
}

fn run() -> Result<bool, Failure> {
    let cli = Cli::parse();
    let cfg = resolve_config(&cli)?;

    match std::env::var(WORKERS_ENV) {
        Ok(raw) => {
            let workers: usize = raw.trim().parse().ok().filter(|&w| w >= 1).ok_or_else(|| {
                Failure::Usage(format!("{WORKERS_ENV} must be a positive integer, got {raw:?}"))
            })?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|err| Failure::Run(format!("cannot build worker pool: {err}")))?;
            pool.install(|| dispatch(&cli.command, &cfg))
        }
        Err(_) => dispatch(&cli.command, &cfg),
    }
}

fn main() {
    match run() {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            std::process::exit(failure.exit_code());
        }
    }
}

//! Batch command-line surface for `diffusim`: configuration parsing, the
//! five subcommands, and their CSV schemas.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::CliError;

/// Environment variable capping worker threads (0 = one per core).
pub const THREADS_ENV: &str = "DIFFUSIM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "diffusim",
    version,
    about = "Seeded diffusion simulations on directed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the configured graph and write it as an edge list.
    GenGraph {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override a config key by dotted path, e.g. graph.n=500.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run an ensemble; writes runs.csv, trajectories.csv and summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run one ensemble per grid cell; writes sweep_summary.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override a key of the sweep's base config.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Classify an observed series; writes fit.csv and references.csv.
    Fit {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Reference config (defaults to the shipped one).
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Aggregate a run directory into curve.csv.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    pub fn execute(&self) -> Result<Vec<PathBuf>, CliError> {
        match self {
            Command::GenGraph {
                config,
                out,
                overrides,
            } => commands::cmd_gen_graph(config, out, overrides),
            Command::Run {
                config,
                out,
                overrides,
            } => commands::cmd_run(config, out, overrides),
            Command::Sweep {
                config,
                out,
                overrides,
            } => commands::cmd_sweep(config, out, overrides),
            Command::Fit {
                series,
                out,
                reference,
            } => commands::cmd_fit(series, out, reference.as_deref()),
            Command::Report { input, out } => commands::cmd_report(input, out),
        }
    }

    /// Executes on a dedicated pool of `threads` workers (0 = automatic).
    pub fn execute_with_threads(&self, threads: usize) -> Result<Vec<PathBuf>, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        pool.install(|| self.execute())
    }
}

/// Parses the thread cap; unset or empty means automatic.
pub fn threads_from_env(value: Option<&str>) -> Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v.parse().map_err(|_| {
            CliError::Validation(format!("{THREADS_ENV}: expected a count, got {v:?}"))
        }),
    }
}

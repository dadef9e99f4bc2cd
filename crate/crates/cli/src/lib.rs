//! Config-driven experiment runner for `symdesign`.
//!
//! A run reads one TOML config, checks every size budget, evaluates the scan
//! on a bounded thread pool and writes a CSV table plus a JSON sidecar. Each
//! work item draws from a random stream addressed by its scan coordinates, so
//! the CSV is byte-identical for any thread count.

pub mod catalogue;
pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::time::Instant;

use thiserror::Error;

pub use config::Config;
pub use output::Record;

/// Set by the interrupt handler; scans stop at the next scan point.
pub static INTERRUPTED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource budget error: {0}")]
    Budget(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<symdesign::Error> for CliError {
    fn from(e: symdesign::Error) -> Self {
        use symdesign::Error as E;
        match e {
            E::Argument(_) => CliError::Config(e.to_string()),
            E::Budget(_) => CliError::Budget(e.to_string()),
            E::Contract(_) | E::Numerical(_) | E::EmptyProjection { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

/// Exit code of a run cut short by an interrupt.
pub const EXIT_INTERRUPTED: i32 = 130;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub dry_run: bool,
}

#[derive(Debug)]
pub struct RunSummary {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub points: usize,
    pub records: usize,
    pub truncated: bool,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn run(opts: &RunOptions) -> Result<RunSummary, CliError> {
    let mut config = Config::load(&opts.config)?;
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if opts.threads == Some(0) {
        return Err(CliError::Config("--threads must be positive".into()));
    }
    let threads = opts.threads.or(config.threads).unwrap_or_else(default_threads);
    let points = experiments::preflight(&config)?;
    if opts.dry_run {
        return Ok(RunSummary { csv: None, json: None, points: points.len(), records: 0, truncated: false });
    }

    let id = config.id();
    let csv_path = opts.out_dir.join(config.output.csv.clone().unwrap_or_else(|| format!("{id}.csv")));
    let json_path = opts.out_dir.join(config.output.json.clone().unwrap_or_else(|| format!("{id}.json")));
    for path in [&csv_path, &json_path] {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcome = experiments::run(&config, &pool)?;
    output::write_csv(&csv_path, &outcome.records)?;
    let meta = output::Metadata {
        schema_version: output::SCHEMA_VERSION,
        experiment: config.experiment.name(),
        id: &id,
        seed: config.seed,
        threads,
        version: env!("CARGO_PKG_VERSION"),
        core_version: symdesign::VERSION,
        csv: file_name(&csv_path),
        records: outcome.records.len(),
        truncated: outcome.truncated,
        total_seconds: start.elapsed().as_secs_f64(),
        timings: &outcome.timings,
        config: serde_json::to_value(&config).map_err(|e| CliError::Io(e.to_string()))?,
    };
    output::write_json(&json_path, &meta)?;
    Ok(RunSummary {
        csv: Some(csv_path),
        json: Some(json_path),
        points: points.len(),
        records: outcome.records.len(),
        truncated: outcome.truncated,
    })
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

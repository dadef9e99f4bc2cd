//! CSV records and the JSON metadata sidecar.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Version of the CSV column layout.
pub const SCHEMA_VERSION: u32 = 1;

/// One row of the results table. Coordinates that do not apply to an
/// experiment are left empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Record {
    pub schema: u32,
    pub experiment: String,
    pub id: String,
    pub n: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub t: Option<usize>,
    pub sector: Option<String>,
    /// Momentum, parity, reflection sign or charge of the sector.
    pub k: Option<i64>,
    pub basis: Option<String>,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    /// Disorder variance.
    pub v: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub samples: Option<usize>,
    /// Basis-vector index for violation profiles.
    pub index: Option<usize>,
}

pub const COLUMNS: [&str; 18] = [
    "schema", "experiment", "id", "n", "n_a", "n_b", "t", "sector", "k", "basis", "alpha", "tau", "v",
    "quantity", "value", "stderr", "samples", "index",
];

pub fn write_csv(path: &Path, records: &[Record]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = csv::Writer::from_writer(file);
    if records.is_empty() {
        w.write_record(COLUMNS).map_err(|e| CliError::Io(e.to_string()))?;
    }
    for r in records {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Wall time of one scan point.
#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub point: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub schema_version: u32,
    pub experiment: &'a str,
    pub id: &'a str,
    pub seed: u64,
    pub threads: usize,
    pub version: &'a str,
    pub core_version: &'a str,
    pub csv: String,
    pub records: usize,
    /// The run was interrupted and the CSV holds only the finished points.
    pub truncated: bool,
    pub total_seconds: f64,
    pub timings: &'a [Timing],
    pub config: serde_json::Value,
}

pub fn write_json(path: &Path, meta: &Metadata<'_>) -> Result<(), CliError> {
    let mut file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(&mut file, meta).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(file).map_err(|e| CliError::Io(e.to_string()))
}

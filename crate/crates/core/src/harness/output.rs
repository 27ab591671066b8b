use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ScenarioConfig;
use super::run::RunRecord;
use super::summary::Summary;
use crate::error::{Error, Result};
use crate::model::RNG_ALGORITHM;

/// Column order of `records.csv`.
pub const RECORD_COLUMNS: [&str; 10] = [
    "seed",
    "demand_bps",
    "algo",
    "case",
    "energy",
    "max_load",
    "jt_links",
    "fp_solves",
    "wall_ms",
    "status",
];

const SUMMARY_COLUMNS: [&str; 12] = [
    "demand_bps",
    "algo",
    "case",
    "ok",
    "infeasible",
    "diverged",
    "error",
    "mean_energy",
    "mean_max_load",
    "mean_jt_links",
    "mean_reduction_pct",
    "baseline",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputPaths {
    pub records: PathBuf,
    pub summary_json: PathBuf,
    pub summary_csv: PathBuf,
    pub metadata: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: &Path) -> OutputPaths {
        OutputPaths {
            records: dir.join("records.csv"),
            summary_json: dir.join("summary.json"),
            summary_csv: dir.join("summary.csv"),
            metadata: dir.join("metadata.json"),
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    crate_version: &'static str,
    rng: &'static str,
    records: usize,
    config: &'a ScenarioConfig,
}

fn csv_bytes<T: Serialize>(header: &[&str], rows: &[T], path: &Path) -> Result<Vec<u8>> {
    let fail = |e: csv::Error| Error::Config(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes `records.csv`, `summary.json`, `summary.csv` and `metadata.json`
/// into `dir`, creating it if needed.
pub fn write_results(records: &[RunRecord], summary: &Summary, cfg: &ScenarioConfig, dir: &Path) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = OutputPaths::in_dir(dir);
    write(&paths.records, &csv_bytes(&RECORD_COLUMNS, records, &paths.records)?)?;
    write(&paths.summary_csv, &csv_bytes(&SUMMARY_COLUMNS, &summary.rows, &paths.summary_csv)?)?;
    write(&paths.summary_json, pretty_json(summary).as_bytes())?;
    let meta = Metadata {
        crate_version: env!("CARGO_PKG_VERSION"),
        rng: RNG_ALGORITHM,
        records: records.len(),
        config: cfg,
    };
    write(&paths.metadata, pretty_json(&meta).as_bytes())?;
    Ok(paths)
}

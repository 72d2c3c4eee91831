use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::time::Horizon;

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// SHA-256 of the canonical JSON form of `value`.
pub fn fingerprint<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(value)?))
}

/// Metrics for one (model, horizon, split) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    pub model: String,
    pub horizon: Horizon,
    pub split: String,
    /// False when the model cannot predict at this horizon.
    pub supported: bool,
    pub n: usize,
    /// Examples with a known truth for which the model produced no prediction.
    pub n_missing: usize,
    pub n_zero_truth: usize,
    pub mape: Option<f64>,
    pub kendall_tau: Option<f64>,
    pub rmse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub model: String,
    /// Observed cascade size (or the lower end of its decade bucket).
    pub size: u64,
    pub samples: usize,
    pub mean_secs: f64,
    pub median_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub model: String,
    pub examples: usize,
    pub dropped_truncated: usize,
    pub dropped_alpha: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub config_fingerprint: String,
    /// The resolved configuration of the run.
    pub config: serde_json::Value,
    pub model_fingerprints: BTreeMap<String, String>,
    pub training: Vec<TrainingSummary>,
    pub counters: BTreeMap<String, usize>,
    pub cells: Vec<CellMetrics>,
    pub timings: Vec<TimingRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

impl EvalReport {
    pub fn cell(&self, model: &str, horizon: Horizon, split: &str) -> Option<&CellMetrics> {
        self.cells.iter().find(|c| c.model == model && c.horizon == horizon && c.split == split)
    }

    /// Columnar text rendering of the metric cells and timings.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}  dataset {}  config {}", self.seed, &self.dataset_fingerprint[..12.min(self.dataset_fingerprint.len())], &self.config_fingerprint[..12.min(self.config_fingerprint.len())]);
        let _ = writeln!(out, "{:<16} {:>8} {:<8} {:>7} {:>8} {:>8} {:>12}", "model", "horizon", "split", "n", "MAPE", "tau", "RMSE");
        for c in &self.cells {
            if !c.supported {
                let _ = writeln!(out, "{:<16} {:>8} {:<8} {:>7} {:>8}", c.model, c.horizon.to_string(), c.split, "-", "unsupported");
                continue;
            }
            let _ = writeln!(
                out,
                "{:<16} {:>8} {:<8} {:>7} {:>8} {:>8} {:>12}",
                c.model,
                c.horizon.to_string(),
                c.split,
                c.n,
                opt(c.mape),
                opt(c.kendall_tau),
                c.rmse.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
            );
        }
        if !self.timings.is_empty() {
            let _ = writeln!(out, "\n{:<16} {:>10} {:>8} {:>14} {:>14}", "model", "size", "samples", "mean (ms)", "median (ms)");
            for t in &self.timings {
                let _ = writeln!(
                    out,
                    "{:<16} {:>10} {:>8} {:>14.6} {:>14.6}",
                    t.model,
                    t.size,
                    t.samples,
                    t.mean_secs * 1e3,
                    t.median_secs * 1e3
                );
            }
        }
        out
    }

    /// Per-horizon curves, one row per cell.
    pub fn curves_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "horizon", "horizon_seconds", "split", "supported", "n", "mape", "kendall_tau", "rmse"])
            .map_err(csv_err)?;
        for c in &self.cells {
            let f = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
            w.write_record([
                c.model.clone(),
                c.horizon.to_string(),
                c.horizon.seconds().to_string(),
                c.split.clone(),
                c.supported.to_string(),
                c.n.to_string(),
                f(c.mape),
                f(c.kendall_tau),
                f(c.rmse),
            ])
            .map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn timing_csv(&self) -> Result<String> {
        timing_csv(&self.timings)
    }

    /// Writes `report.json`, `report.txt`, `curves.csv` and `timing.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        fs::write(dir.join("report.txt"), self.render_table())?;
        fs::write(dir.join("curves.csv"), self.curves_csv()?)?;
        fs::write(dir.join("timing.csv"), self.timing_csv()?)?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn timing_csv(rows: &[TimingRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "size", "samples", "mean_secs", "median_secs"]).map_err(csv_err)?;
    for t in rows {
        w.write_record([t.model.clone(), t.size.to_string(), t.samples.to_string(), t.mean_secs.to_string(), t.median_secs.to_string()])
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::ablation::AblationResult;
use super::latency::LatencyReport;
use super::matrix::{ErrorMatrix, MatrixSummary};
use super::stats::ErrorStats;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

/// A result together with the configuration and seeds that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub provenance: serde_json::Value,
    pub result: T,
}

/// Row-major CSV rendering; the first row is the header.
pub trait Tabular {
    fn rows(&self) -> Vec<Vec<String>>;
}

fn num(v: f64) -> String {
    v.to_string()
}

fn stats_row(label: &str, s: &ErrorStats) -> Vec<String> {
    vec![label.to_owned(), num(s.min), num(s.mean), num(s.max), s.n.to_string()]
}

fn stats_header(first: &str) -> Vec<String> {
    [first, "min", "mean", "max", "n"].iter().map(|s| s.to_string()).collect()
}

impl Tabular for ErrorMatrix {
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![std::iter::once("train\\test".to_owned()).chain(self.devices.iter().cloned()).collect()];
        for (device, cells) in self.devices.iter().zip(&self.cells) {
            let mut row = vec![device.clone()];
            row.extend(cells.iter().map(|c| c.mean().map(num).unwrap_or_default()));
            rows.push(row);
        }
        rows
    }
}

impl Tabular for ErrorStats {
    fn rows(&self) -> Vec<Vec<String>> {
        vec![stats_header("scope"), stats_row("all", self)]
    }
}

impl Tabular for MatrixSummary {
    fn rows(&self) -> Vec<Vec<String>> {
        vec![
            stats_header("scope"),
            stats_row("over_cells", &self.over_cells),
            stats_row("pooled", &self.pooled),
        ]
    }
}

impl Tabular for AblationResult {
    fn rows(&self) -> Vec<Vec<String>> {
        let mut header = stats_header("arm");
        header.extend(["training_rows".to_owned(), "relative_mean_delta".to_owned()]);
        let delta = self.relative_mean_delta.map(num).unwrap_or_default();
        let mut with = stats_row("with_sae", &self.with_sae);
        with.extend([self.with_training_rows.to_string(), delta.clone()]);
        let mut without = stats_row("without_sae", &self.without_sae);
        without.extend([self.without_training_rows.to_string(), delta]);
        vec![header, with, without]
    }
}

impl Tabular for LatencyReport {
    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["query".to_owned(), "ms".to_owned()]];
        rows.extend(self.per_query_ms.iter().enumerate().map(|(i, &t)| vec![i.to_string(), num(t)]));
        rows
    }
}

/// Writes `report` to `path`. CSV carries only the result table; JSON
/// carries the provenance as well.
pub fn emit_report<T: Serialize + Tabular>(report: &Report<T>, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| Error::Artifact(format!("report encoding failed: {e}")))?;
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in report.result.rows() {
                w.write_record(&row).map_err(|e| Error::Artifact(format!("csv encoding failed: {e}")))?;
            }
            w.into_inner().map_err(|e| Error::Artifact(format!("csv encoding failed: {e}")))?
        }
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_json_report<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Report<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Artifact(format!("{}: {e}", path.display())))
}

/// Run directory name: start time and a short configuration hash.
pub fn run_dir_name(unix_seconds: u64, config_hash: &str) -> String {
    let short: String = config_hash.chars().take(12).collect();
    format!("run-{unix_seconds}-{short}")
}

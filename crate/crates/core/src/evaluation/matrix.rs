use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{error_stats, ErrorStats};
use crate::data::{split_per_rp, FingerprintDatabase};
use crate::error::{Error, Result};
use crate::gbt::GbtConfig;
use crate::localization::{euclidean_error, knn_predict, train_model, LocalizationModel};
use crate::sae::SaeConfig;

/// Per reference point split used where train and test device coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSettings {
    pub train_per_rp: usize,
    pub test_per_rp: usize,
    pub seed: u64,
}

impl Default for SplitSettings {
    fn default() -> Self {
        Self {
            train_per_rp: 5,
            test_per_rp: 1,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    pub stats: Option<ErrorStats>,
    pub absent_reason: Option<String>,
}

impl MatrixCell {
    pub fn mean(&self) -> Option<f64> {
        self.stats.map(|s| s.mean)
    }
}

/// Mean error for every (train device, test device) pair; rows are the
/// training device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMatrix {
    pub devices: Vec<String>,
    pub cells: Vec<Vec<MatrixCell>>,
}

/// Summaries of an [`ErrorMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSummary {
    /// Min / mean / max over the populated cell means.
    pub over_cells: ErrorStats,
    /// Over every test sample of every populated cell.
    pub pooled: ErrorStats,
}

impl ErrorMatrix {
    pub fn summary(&self) -> Result<MatrixSummary> {
        let populated: Vec<ErrorStats> = self.cells.iter().flatten().filter_map(|c| c.stats).collect();
        let means: Vec<f64> = populated.iter().map(|s| s.mean).collect();
        let over_cells = error_stats(&means)?;
        let n: usize = populated.iter().map(|s| s.n).sum();
        let weighted = populated.iter().map(|s| s.mean * s.n as f64).sum::<f64>() / n as f64;
        let min = populated.iter().map(|s| s.min).fold(f64::INFINITY, f64::min);
        let max = populated.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
        Ok(MatrixSummary {
            over_cells,
            pooled: ErrorStats {
                min,
                mean: weighted.clamp(min, max),
                max,
                n,
            },
        })
    }
}

/// Localization error of `model` on every record of `test`.
pub fn evaluate_model(model: &LocalizationModel, test: &FingerprintDatabase) -> Result<Vec<f64>> {
    test.records()
        .iter()
        .map(|r| {
            let p = model.predict_fingerprint(r.rssi.as_slice())?;
            Ok(euclidean_error(&r.location, &p.location))
        })
        .collect()
}

/// Localization error of the `k`-nearest-neighbour baseline on every record of `test`.
pub fn knn_errors(train: &FingerprintDatabase, test: &FingerprintDatabase, k: usize) -> Result<Vec<f64>> {
    test.records()
        .iter()
        .map(|r| Ok(euclidean_error(&r.location, &knn_predict(train, r.rssi.as_slice(), k)?)))
        .collect()
}

/// Trains one model per training device and scores it on every test
/// device. Same-device cells train and test on a per reference point split.
pub fn cross_device_matrix<S: AsRef<str>>(
    db: &FingerprintDatabase,
    devices: &[S],
    sae_cfg: Option<&SaeConfig>,
    gbt_cfg: &GbtConfig,
    split: SplitSettings,
) -> Result<ErrorMatrix> {
    let known = db.devices();
    let devices: Vec<String> = devices.iter().map(|d| d.as_ref().to_owned()).collect();
    if devices.is_empty() {
        return Err(Error::Config("no devices given".into()));
    }
    if let Some(d) = devices.iter().find(|d| !known.contains(d)) {
        return Err(Error::UnknownDevice(d.clone()));
    }
    let per_device: Vec<FingerprintDatabase> = devices.iter().map(|d| db.filter(|r| &r.device == d)).collect();

    let pairs: Vec<(usize, usize)> = (0..devices.len())
        .flat_map(|i| (0..devices.len()).map(move |j| (i, j)))
        .collect();
    let cells: Vec<MatrixCell> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (train, test) = if i == j {
                match split_per_rp(&per_device[i], split.train_per_rp, split.test_per_rp, split.seed) {
                    Ok(pair) => pair,
                    Err(e @ Error::InsufficientSamples { .. }) => {
                        return Ok(MatrixCell {
                            stats: None,
                            absent_reason: Some(e.to_string()),
                        })
                    }
                    Err(e) => return Err(e),
                }
            } else {
                (per_device[i].clone(), per_device[j].clone())
            };
            if test.is_empty() || train.is_empty() {
                return Ok(MatrixCell {
                    stats: None,
                    absent_reason: Some("no records on one side of the split".into()),
                });
            }
            let model = train_model(&train, sae_cfg, gbt_cfg)?;
            let errors = evaluate_model(&model, &test)?;
            Ok(MatrixCell {
                stats: Some(error_stats(&errors)?),
                absent_reason: None,
            })
        })
        .collect::<Result<_>>()?;

    let n = devices.len();
    let mut rows = Vec::with_capacity(n);
    let mut it = cells.into_iter();
    for _ in 0..n {
        rows.push(it.by_ref().take(n).collect());
    }
    Ok(ErrorMatrix { devices, cells: rows })
}

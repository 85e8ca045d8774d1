use serde::{Deserialize, Serialize};

use super::matrix::evaluate_model;
use super::stats::{error_stats, ErrorStats};
use crate::data::FingerprintDatabase;
use crate::error::Result;
use crate::gbt::GbtConfig;
use crate::localization::train_model;
use crate::sae::SaeConfig;

/// Paired runs that differ only in whether augmentation is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationResult {
    pub with_sae: ErrorStats,
    pub without_sae: ErrorStats,
    /// `(without.mean - with.mean) / without.mean`; `None` when the
    /// unaugmented mean error is zero.
    pub relative_mean_delta: Option<f64>,
    pub with_training_rows: usize,
    pub without_training_rows: usize,
    pub dataset_hash: String,
    pub with_training_hash: String,
    pub without_training_hash: String,
}

pub fn ablation_sae(
    train: &FingerprintDatabase,
    test: &FingerprintDatabase,
    sae_cfg: &SaeConfig,
    gbt_cfg: &GbtConfig,
) -> Result<AblationResult> {
    let with = train_model(train, Some(sae_cfg), gbt_cfg)?;
    let without = train_model(train, None, gbt_cfg)?;
    let with_sae = error_stats(&evaluate_model(&with, test)?)?;
    let without_sae = error_stats(&evaluate_model(&without, test)?)?;
    let relative_mean_delta =
        (without_sae.mean != 0.0).then(|| (without_sae.mean - with_sae.mean) / without_sae.mean);
    Ok(AblationResult {
        with_sae,
        without_sae,
        relative_mean_delta,
        with_training_rows: with.metadata.training_rows,
        without_training_rows: without.metadata.training_rows,
        dataset_hash: train.content_hash(),
        with_training_hash: with.metadata.training_set_hash,
        without_training_hash: without.metadata.training_set_hash,
    })
}

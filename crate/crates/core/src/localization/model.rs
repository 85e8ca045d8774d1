use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Scan;
use crate::data::{ApRegistry, FingerprintDatabase, Location};
use crate::error::{Error, Result};
use crate::gbt::{fit_ensemble, GbtConfig, GbtEnsemble};
use crate::sae::{augment, fine_tune, greedy_pretrain, SaeConfig, StackedAutoencoder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    /// `None` when the model was trained without augmentation.
    pub sae_config: Option<SaeConfig>,
    pub gbt_config: GbtConfig,
    /// Content hash of the database passed to training.
    pub dataset_hash: String,
    /// Content hash of the set the ensemble was fitted on.
    pub training_set_hash: String,
    pub training_rows: usize,
}

/// Everything needed to turn a raw scan into a position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationModel {
    pub registry: ApRegistry,
    pub sae: Option<StackedAutoencoder>,
    pub ensemble: GbtEnsemble,
    pub rp_coordinates: BTreeMap<String, Location>,
    pub metadata: ModelMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub location: Location,
    pub rp_label: String,
    /// Readings in the scan that matched the registry.
    pub known_aps: usize,
    /// Set when no reading matched; the prediction is then made on an
    /// all-silent fingerprint.
    pub low_confidence: bool,
}

/// Original records, followed by their autoencoder reconstructions when
/// `sae_cfg` is given.
pub fn build_training_set(
    train: &FingerprintDatabase,
    sae_cfg: Option<&SaeConfig>,
) -> Result<(Option<StackedAutoencoder>, FingerprintDatabase)> {
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let Some(cfg) = sae_cfg else {
        return Ok((None, train.clone()));
    };
    let data = train.fingerprints();
    let sae = greedy_pretrain(&data, cfg)?;
    let sae = fine_tune(sae, &data, cfg)?;
    let augmented = augment(&sae, train)?;
    Ok((Some(sae), augmented))
}

/// Augments `train` with the stacked autoencoder (unless `sae_cfg` is
/// `None`) and boosts the ensemble on the concatenation.
pub fn train_model(
    train: &FingerprintDatabase,
    sae_cfg: Option<&SaeConfig>,
    gbt_cfg: &GbtConfig,
) -> Result<LocalizationModel> {
    if train.registry().is_empty() {
        return Err(Error::Empty("access point registry"));
    }
    let (sae, training_set) = build_training_set(train, sae_cfg)?;
    let ensemble = fit_ensemble(&training_set, gbt_cfg)?;
    Ok(LocalizationModel {
        registry: train.registry().clone(),
        sae,
        ensemble,
        rp_coordinates: train.rp_coordinates().clone(),
        metadata: ModelMetadata {
            sae_config: sae_cfg.cloned(),
            gbt_config: gbt_cfg.clone(),
            dataset_hash: train.content_hash(),
            training_set_hash: training_set.content_hash(),
            training_rows: training_set.len(),
        },
    })
}

impl LocalizationModel {
    /// Predicts from an already normalized fingerprint.
    pub fn predict_fingerprint(&self, x: &[f64]) -> Result<Prediction> {
        let label = self.ensemble.predict_label(x)?;
        let location = *self
            .rp_coordinates
            .get(label)
            .ok_or_else(|| Error::Artifact(format!("class {label:?} has no coordinates")))?;
        Ok(Prediction {
            location,
            rp_label: label.to_owned(),
            known_aps: x.iter().filter(|&&v| v > 0.0).count(),
            low_confidence: false,
        })
    }

    pub fn predict(&self, scan: &Scan) -> Result<Prediction> {
        predict_location(self, scan)
    }
}

/// Position of the reference point the ensemble ranks highest for `scan`.
pub fn predict_location(model: &LocalizationModel, scan: &Scan) -> Result<Prediction> {
    if model.registry.is_empty() {
        return Err(Error::Empty("access point registry"));
    }
    let (x, known) = scan.to_fingerprint(&model.registry);
    let mut p = model.predict_fingerprint(&x)?;
    p.known_aps = known;
    p.low_confidence = known == 0;
    Ok(p)
}

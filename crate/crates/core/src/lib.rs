//! Indoor localization from Wi-Fi RSS fingerprints.
//!
//! The pipeline normalizes fingerprints, doubles the training set with
//! reconstructions from a greedy layer-wise stacked autoencoder, and fits
//! a multiclass gradient-boosted ensemble of oblivious trees over
//! reference points. [`evaluation`] reproduces cross-device error
//! matrices, augmentation ablations and latency measurements.

pub mod artifact;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod gbt;
pub mod localization;
pub mod sae;
pub mod synthetic;

pub use data::{ApRegistry, FingerprintDatabase, FingerprintRecord, Location, RssiVector};
pub use error::{Error, Result};
pub use gbt::{GbtConfig, GbtEnsemble};
pub use localization::{LocalizationModel, Prediction, Scan};
pub use sae::{SaeConfig, StackedAutoencoder};

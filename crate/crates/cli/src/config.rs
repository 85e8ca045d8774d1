//! Run configuration: a flat `key = value` file whose keys are the long
//! flag names with `_` for `-`. Flags override file values; anything left
//! unset falls back to the library defaults.
//!
//! ```toml
//! data = "uji_train.csv"
//! format = "uji"
//! devices = "13,14"
//! sae = true
//! sae_epochs = 100
//! gbt_iterations = 50
//! gbt_depth = 7
//! ```

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rssloc_core::data::{load_canonical_csv, load_uji_csv, UjiOptions};
use rssloc_core::evaluation::SplitSettings;
use rssloc_core::sae::{Optimizer, WidthConfig};
use rssloc_core::{FingerprintDatabase, GbtConfig, SaeConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable naming the default output directory for run reports.
pub const OUT_DIR_ENV: &str = "RSSLOC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "runs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// UJIIndoorLoc columns (WAP001..WAP520 and metadata)
    Uji,
    /// device,rp_label,x,y,z followed by one dBm column per access point
    Canonical,
}

/// Every key the config file accepts.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub data: Option<PathBuf>,
    pub format: Option<DataFormat>,
    pub floor_height: Option<f64>,
    pub origin_x: Option<f64>,
    pub origin_y: Option<f64>,
    pub devices: Option<String>,
    pub train_devices: Option<String>,
    pub test_devices: Option<String>,
    pub sae: Option<bool>,
    pub sae_optimizer: Option<String>,
    pub sae_learning_rate: Option<f64>,
    pub sae_epochs: Option<usize>,
    pub sae_batch_size: Option<usize>,
    pub sae_seed: Option<u64>,
    pub sae_hidden: Option<usize>,
    pub sae_code: Option<usize>,
    pub gbt_iterations: Option<usize>,
    pub gbt_depth: Option<usize>,
    pub gbt_learning_rate: Option<f64>,
    pub gbt_l2_leaf_reg: Option<f64>,
    pub gbt_n_bins: Option<usize>,
    pub gbt_feature_fraction: Option<f64>,
    pub gbt_seed: Option<u64>,
    pub split_train_per_rp: Option<usize>,
    pub split_test_per_rp: Option<usize>,
    pub split_seed: Option<u64>,
    pub model: Option<PathBuf>,
    pub scan: Option<PathBuf>,
    pub queries: Option<usize>,
    pub repetitions: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {}", path.display(), e.message())))
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|d| !d.is_empty()).map(str::to_owned).collect()
}

/// Flag list if given, else the comma-separated file value, else empty.
pub fn device_list(flag: &[String], file: Option<&String>) -> Vec<String> {
    if flag.is_empty() {
        file.map(|s| split_list(s)).unwrap_or_default()
    } else {
        flag.iter().flat_map(|s| split_list(s)).collect()
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArg {
    /// Flat key = value config file; flags take precedence over its values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Fingerprint data file (required here or as `data` in the config)
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Layout of the data file [default: canonical]
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Meters between floors when reading UJI files [default: 4]
    #[arg(long, value_name = "M")]
    pub floor_height: Option<f64>,
    /// Easting subtracted from UJI coordinates [default: minimum in the file]
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    pub origin_x: Option<f64>,
    /// Northing subtracted from UJI coordinates [default: minimum in the file]
    #[arg(long, value_name = "M", allow_hyphen_values = true)]
    pub origin_y: Option<f64>,
}

/// Resolved data source.
#[derive(Debug, Clone, Serialize)]
pub struct DataSource {
    pub path: PathBuf,
    pub format: DataFormat,
    pub floor_height: f64,
    pub origin: Option<(f64, f64)>,
}

impl DataArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<DataSource, CliError> {
        let path = self
            .data
            .clone()
            .or_else(|| file.data.clone())
            .ok_or_else(|| CliError::Usage("--data is required (or `data` in the config file)".into()))?;
        let x = self.origin_x.or(file.origin_x);
        let y = self.origin_y.or(file.origin_y);
        let origin = match (x, y) {
            (Some(x), Some(y)) => Some((x, y)),
            (None, None) => None,
            _ => return Err(CliError::Usage("--origin-x and --origin-y must be given together".into())),
        };
        Ok(DataSource {
            path,
            format: self.format.or(file.format).unwrap_or(DataFormat::Canonical),
            floor_height: self.floor_height.or(file.floor_height).unwrap_or(UjiOptions::default().floor_height),
            origin,
        })
    }
}

impl DataSource {
    pub fn load(&self) -> Result<FingerprintDatabase, CliError> {
        let db = match self.format {
            DataFormat::Uji => load_uji_csv(
                &self.path,
                &UjiOptions {
                    floor_height: self.floor_height,
                    origin: self.origin,
                },
            )?,
            DataFormat::Canonical => load_canonical_csv(&self.path)?,
        };
        Ok(db)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SaeArgs {
    /// Train without autoencoder augmentation (config key: sae = false)
    #[arg(long)]
    pub no_sae: bool,
    /// Autoencoder update rule: sgd or adam [default: adam]
    #[arg(long, value_name = "NAME")]
    pub sae_optimizer: Option<String>,
    /// Autoencoder learning rate [default: 0.001]
    #[arg(long, value_name = "LR")]
    pub sae_learning_rate: Option<f64>,
    /// Epochs per autoencoder stage [default: 100]
    #[arg(long, value_name = "N")]
    pub sae_epochs: Option<usize>,
    /// Autoencoder mini-batch size [default: 32]
    #[arg(long, value_name = "N")]
    pub sae_batch_size: Option<usize>,
    /// Autoencoder seed [default: 42]
    #[arg(long, value_name = "SEED")]
    pub sae_seed: Option<u64>,
    /// AE1 code width [default: half the number of access points, rounded up]
    #[arg(long, value_name = "N")]
    pub sae_hidden: Option<usize>,
    /// AE3 code width [default: a quarter of the number of access points, rounded up]
    #[arg(long, value_name = "N")]
    pub sae_code: Option<usize>,
}

impl SaeArgs {
    /// `None` when augmentation is disabled.
    pub fn resolve(&self, file: &FileConfig) -> Result<Option<SaeConfig>, CliError> {
        if self.no_sae || file.sae == Some(false) {
            return Ok(None);
        }
        self.resolve_config(file).map(Some)
    }

    /// Autoencoder settings regardless of whether augmentation is enabled.
    pub fn resolve_config(&self, file: &FileConfig) -> Result<SaeConfig, CliError> {
        let d = SaeConfig::default();
        let optimizer = match self.sae_optimizer.as_ref().or(file.sae_optimizer.as_ref()) {
            Some(s) => s.parse::<Optimizer>()?,
            None => d.optimizer,
        };
        let hidden = self.sae_hidden.or(file.sae_hidden);
        let code = self.sae_code.or(file.sae_code);
        let widths = match (hidden, code) {
            (None, None) => None,
            (Some(hidden), Some(code)) => Some(WidthConfig { hidden, code }),
            _ => return Err(CliError::Usage("--sae-hidden and --sae-code must be given together".into())),
        };
        let cfg = SaeConfig {
            widths,
            optimizer,
            learning_rate: self.sae_learning_rate.or(file.sae_learning_rate).unwrap_or(d.learning_rate),
            epochs: self.sae_epochs.or(file.sae_epochs).unwrap_or(d.epochs),
            batch_size: self.sae_batch_size.or(file.sae_batch_size).unwrap_or(d.batch_size),
            seed: self.sae_seed.or(file.sae_seed).unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GbtArgs {
    /// Boosting rounds, one tree each [default: 50]
    #[arg(long, value_name = "N")]
    pub gbt_iterations: Option<usize>,
    /// Oblivious tree depth [default: 7]
    #[arg(long, value_name = "N")]
    pub gbt_depth: Option<usize>,
    /// Weight of each tree [default: 0.1]
    #[arg(long, value_name = "LR")]
    pub gbt_learning_rate: Option<f64>,
    /// L2 regularization of leaf values [default: 5]
    #[arg(long, value_name = "LAMBDA")]
    pub gbt_l2_leaf_reg: Option<f64>,
    /// Histogram bins per feature, 2 to 256 [default: 32]
    #[arg(long, value_name = "N")]
    pub gbt_n_bins: Option<usize>,
    /// Fraction of features considered per tree [default: 0.8]
    #[arg(long, value_name = "F")]
    pub gbt_feature_fraction: Option<f64>,
    /// Boosting seed [default: 42]
    #[arg(long, value_name = "SEED")]
    pub gbt_seed: Option<u64>,
}

impl GbtArgs {
    pub fn resolve(&self, file: &FileConfig) -> Result<GbtConfig, CliError> {
        let d = GbtConfig::default();
        let cfg = GbtConfig {
            iterations: self.gbt_iterations.or(file.gbt_iterations).unwrap_or(d.iterations),
            depth: self.gbt_depth.or(file.gbt_depth).unwrap_or(d.depth),
            learning_rate: self.gbt_learning_rate.or(file.gbt_learning_rate).unwrap_or(d.learning_rate),
            l2_leaf_reg: self.gbt_l2_leaf_reg.or(file.gbt_l2_leaf_reg).unwrap_or(d.l2_leaf_reg),
            n_bins: self.gbt_n_bins.or(file.gbt_n_bins).unwrap_or(d.n_bins),
            feature_fraction: self.gbt_feature_fraction.or(file.gbt_feature_fraction).unwrap_or(d.feature_fraction),
            seed: self.gbt_seed.or(file.gbt_seed).unwrap_or(d.seed),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SplitArgs {
    /// Training samples per reference point in same-device cells [default: 5]
    #[arg(long, value_name = "N")]
    pub split_train_per_rp: Option<usize>,
    /// Test samples per reference point in same-device cells [default: 1]
    #[arg(long, value_name = "N")]
    pub split_test_per_rp: Option<usize>,
    /// Seed of the per reference point split [default: 42]
    #[arg(long, value_name = "SEED")]
    pub split_seed: Option<u64>,
}

impl SplitArgs {
    pub fn resolve(&self, file: &FileConfig) -> SplitSettings {
        let d = SplitSettings::default();
        SplitSettings {
            train_per_rp: self.split_train_per_rp.or(file.split_train_per_rp).unwrap_or(d.train_per_rp),
            test_per_rp: self.split_test_per_rp.or(file.split_test_per_rp).unwrap_or(d.test_per_rp),
            seed: self.split_seed.or(file.split_seed).unwrap_or(d.seed),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutDirArg {
    /// Directory that receives the run directory [default: $RSSLOC_OUT_DIR, else ./runs]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl OutDirArg {
    pub fn resolve(&self, file: &FileConfig) -> PathBuf {
        self.out
            .clone()
            .or_else(|| file.out.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

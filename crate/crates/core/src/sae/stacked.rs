use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::autoencoder::to_matrix;
use super::{Activation, Autoencoder, DenseLayer};
use crate::data::{FingerprintDatabase, FingerprintRecord, RssiVector};
use crate::error::{Error, Result};

// RNG streams, one per independent random process.
const STREAM_INIT: u64 = 1;
const STREAM_AE1: u64 = 10;
const STREAM_AE3: u64 = 11;
const STREAM_AE2: u64 = 12;

/// Hidden widths of the stack for a `d`-dimensional input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidthConfig {
    /// AE1 code width `h`, also the input width of AE3.
    pub hidden: usize,
    /// AE3 code width `q`, the bottleneck of AE2.
    pub code: usize,
}

impl WidthConfig {
    /// Halving funnel: `h = ceil(d/2)`, `q = ceil(d/4)`.
    pub fn for_input(d: usize) -> Self {
        Self {
            hidden: d.div_ceil(2).max(1),
            code: d.div_ceil(4).max(1),
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.code == 0 || self.code > self.hidden || self.hidden > d {
            return Err(Error::Config(format!(
                "widths must satisfy 1 <= code ({}) <= hidden ({}) <= input ({d})",
                self.code, self.hidden
            )));
        }
        Ok(())
    }
}

/// Update rule for mini-batch training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    /// Plain gradient step.
    Sgd,
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    #[default]
    Adam,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sgd" => Ok(Self::Sgd),
            "adam" => Ok(Self::Adam),
            other => Err(Error::Config(format!("unknown optimizer {other:?} (expected sgd or adam)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaeConfig {
    /// `None` derives widths from the input dimension.
    pub widths: Option<WidthConfig>,
    #[serde(default)]
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for SaeConfig {
    fn default() -> Self {
        Self {
            widths: None,
            optimizer: Optimizer::Adam,
            learning_rate: 0.001,
            epochs: 100,
            batch_size: 32,
            seed: 42,
        }
    }
}

impl SaeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// AE1, AE2 and AE3 together with their training histories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedAutoencoder {
    pub widths: WidthConfig,
    pub ae1: Autoencoder,
    pub ae2: Autoencoder,
    pub ae3: Autoencoder,
    pub ae1_loss: Vec<f64>,
    pub ae3_loss: Vec<f64>,
    pub fine_tune_loss: Vec<f64>,
}

impl StackedAutoencoder {
    pub fn input_dim(&self) -> usize {
        self.ae1.input_dim()
    }

    /// Parameters over all three autoencoders, shared layers counted once
    /// per autoencoder.
    pub fn param_count(&self) -> usize {
        self.ae1.param_count() + self.ae2.param_count() + self.ae3.param_count()
    }

    /// Synthetic counterpart of every row: `AE2(AE1-L1(x))`.
    pub fn reconstruct_batch(&self, data: &Array2<f64>) -> Result<Array2<f64>> {
        if data.ncols() != self.input_dim() {
            return Err(Error::Shape {
                expected: self.input_dim(),
                actual: data.ncols(),
                context: "stacked autoencoder input width",
            });
        }
        let first = self.ae1.forward_prefix(data.view(), 1);
        Ok(self.ae2.forward_batch(first.view()))
    }

    pub fn reconstruct(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = to_matrix(&[x.to_vec()], self.input_dim())?;
        Ok(self.reconstruct_batch(&m)?.into_raw_vec_and_offset().0)
    }
}

/// Trains AE1 on `data`, AE3 on AE1's second-layer codes, then assembles AE2
/// from copies of their layers around a freshly initialized bottleneck.
pub fn greedy_pretrain(data: &[Vec<f64>], cfg: &SaeConfig) -> Result<StackedAutoencoder> {
    cfg.validate()?;
    let d = data.first().ok_or(Error::Empty("autoencoder training data"))?.len();
    if d == 0 {
        return Err(Error::Empty("fingerprint dimension"));
    }
    let widths = cfg.widths.unwrap_or_else(|| WidthConfig::for_input(d));
    widths.validate(d)?;
    let (h, q) = (widths.hidden, widths.code);
    let x = to_matrix(data, d)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(STREAM_INIT);
    let mut ae1 = Autoencoder::new(vec![
        DenseLayer::init(d, d, Activation::Relu, &mut rng),
        DenseLayer::init(d, h, Activation::Relu, &mut rng),
        DenseLayer::init(h, d, Activation::Sigmoid, &mut rng),
    ])?;
    let mut ae3 = Autoencoder::new(vec![
        DenseLayer::init(h, h, Activation::Relu, &mut rng),
        DenseLayer::init(h, q, Activation::Relu, &mut rng),
        // AE3 reconstructs non-negative rectifier codes, not fingerprints.
        DenseLayer::init(q, h, Activation::Relu, &mut rng),
    ])?;
    let bottleneck = DenseLayer::init(q, q, Activation::Relu, &mut rng);

    let ae1_loss = ae1.fit(x.view(), x.view(), cfg, STREAM_AE1)?;
    let codes = ae1.forward_prefix(x.view(), 2);
    let ae3_loss = ae3.fit(codes.view(), codes.view(), cfg, STREAM_AE3)?;

    let ae2 = Autoencoder::new(vec![
        ae1.layers()[1].clone(),
        ae3.layers()[1].clone(),
        bottleneck,
        ae3.layers()[2].clone(),
        ae1.layers()[2].clone(),
    ])?;

    Ok(StackedAutoencoder {
        widths,
        ae1,
        ae2,
        ae3,
        ae1_loss,
        ae3_loss,
        fine_tune_loss: Vec::new(),
    })
}

/// Trains AE2 end to end from the AE1-L1 representation back to the
/// fingerprint. AE1 and AE3 stay frozen.
pub fn fine_tune(mut sae: StackedAutoencoder, data: &[Vec<f64>], cfg: &SaeConfig) -> Result<StackedAutoencoder> {
    if data.is_empty() {
        return Err(Error::Empty("autoencoder training data"));
    }
    let x = to_matrix(data, sae.input_dim())?;
    let first = sae.ae1.forward_prefix(x.view(), 1);
    let history = sae.ae2.fit(first.view(), x.view(), cfg, STREAM_AE2)?;
    sae.fine_tune_loss.extend(history);
    Ok(sae)
}

/// Returns `db` followed by one synthetic record per original record.
///
/// Reconstructions are snapped to whole dBm, and readings weaker than the
/// weakest reading present in `db` become "not detected".
pub fn augment(sae: &StackedAutoencoder, db: &FingerprintDatabase) -> Result<FingerprintDatabase> {
    let originals: Vec<&FingerprintRecord> = db.records().iter().filter(|r| !r.synthetic).collect();
    let rows: Vec<Vec<f64>> = originals.iter().map(|r| r.rssi.as_slice().to_vec()).collect();
    let x = to_matrix(&rows, db.dim())?;
    let synth = sae.reconstruct_batch(&x)?;
    let floor = detection_floor(&rows);

    let mut out = db.clone();
    let mut synthetic = Vec::with_capacity(originals.len());
    for (r, row) in originals.iter().zip(synth.outer_iter()) {
        synthetic.push(FingerprintRecord {
            rssi: RssiVector::new(row.iter().map(|&v| snap_reading(v, floor)).collect())?,
            location: r.location,
            rp_label: r.rp_label.clone(),
            device: r.device.clone(),
            synthetic: true,
        });
    }
    out.extend_records(synthetic)?;
    Ok(out)
}

/// Smallest non-zero value in `rows`; 1.0 when every value is zero.
fn detection_floor(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flatten().copied().filter(|&v| v > 0.0).fold(1.0, f64::min)
}

/// One normalized unit per dBm.
const DBM_STEP: f64 = 0.01;

fn snap_reading(v: f64, floor: f64) -> f64 {
    let snapped = (v / DBM_STEP).round() * DBM_STEP;
    if snapped < floor - DBM_STEP / 2.0 {
        0.0
    } else {
        snapped.clamp(0.0, 1.0)
    }
}

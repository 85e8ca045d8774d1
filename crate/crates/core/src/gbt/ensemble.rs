use std::collections::BTreeMap;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binning::{build_bins, BinnedMatrix, BinningScheme};
use super::loss::{argmax, cross_entropy, grad_hess_into, softmax_in_place};
use super::tree::{fit_oblivious_tree, ObliviousTree};
use crate::data::FingerprintDatabase;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub iterations: usize,
    pub depth: usize,
    pub learning_rate: f64,
    /// L2 regularization on leaf values.
    pub l2_leaf_reg: f64,
    pub n_bins: usize,
    /// Fraction of features offered to each tree.
    pub feature_fraction: f64,
    pub seed: u64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        Self {
            iterations: 50,
            depth: 7,
            learning_rate: 0.1,
            l2_leaf_reg: 5.0,
            n_bins: 32,
            feature_fraction: 0.8,
            seed: 42,
        }
    }
}

impl GbtConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.depth == 0 || self.depth > 16 {
            return fail(format!("depth must be in 1..=16, got {}", self.depth));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if !(self.l2_leaf_reg >= 0.0 && self.l2_leaf_reg.is_finite()) {
            return fail(format!("l2_leaf_reg must be non-negative, got {}", self.l2_leaf_reg));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return fail(format!("feature_fraction must be in (0, 1], got {}", self.feature_fraction));
        }
        if !(2..=256).contains(&self.n_bins) {
            return fail(format!("n_bins must be in 2..=256, got {}", self.n_bins));
        }
        Ok(())
    }
}

/// Monotone transformation applied to the summed scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    Identity,
    Softmax,
}

impl Link {
    pub fn apply(self, scores: &mut [f64]) {
        if self == Link::Softmax {
            softmax_in_place(scores);
        }
    }
}

/// Boosted oblivious trees over reference point classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtEnsemble {
    pub trees: Vec<ObliviousTree>,
    pub learning_rate: f64,
    pub link: Link,
    pub class_labels: Vec<String>,
    pub binning: BinningScheme,
    pub base_score: Vec<f64>,
    pub config: GbtConfig,
    /// Mean training cross-entropy before the first tree and after each one.
    pub training_loss: Vec<f64>,
}

impl GbtEnsemble {
    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.binning.n_features() {
            return Err(Error::Shape {
                expected: self.binning.n_features(),
                actual: x.len(),
                context: "ensemble input width",
            });
        }
        Ok(())
    }

    /// Untransformed score `base + lr * Σ leaf` using the first `n_trees` trees.
    pub fn raw_scores_upto(&self, x: &[f64], n_trees: usize) -> Result<Vec<f64>> {
        self.check_width(x)?;
        let mut scores = self.base_score.clone();
        for tree in self.trees.iter().take(n_trees) {
            let leaf = tree.leaf_for_values(&self.binning, x);
            for (s, v) in scores.iter_mut().zip(tree.leaf_values.row(leaf)) {
                *s += self.learning_rate * v;
            }
        }
        Ok(scores)
    }

    pub fn raw_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.raw_scores_upto(x, self.trees.len())
    }

    /// Link-transformed scores; class probabilities under [`Link::Softmax`].
    pub fn predict_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut scores = self.raw_scores(x)?;
        self.link.apply(&mut scores);
        Ok(scores)
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_scores(x)?))
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&str> {
        let class = self.predict_class(x)?;
        Ok(&self.class_labels[class])
    }
}

/// Boosts `cfg.iterations` oblivious trees on the records of `train`, one
/// tree with per-class leaves per round.
pub fn fit_ensemble(train: &FingerprintDatabase, cfg: &GbtConfig) -> Result<GbtEnsemble> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("gradient boosting training set"));
    }
    let class_labels = train.rp_labels();
    let class_of: BTreeMap<&str, usize> = class_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let c = class_labels.len();

    // Canonical row order makes the fit independent of record order.
    let mut rows: Vec<(usize, &[f64])> = train
        .records()
        .iter()
        .map(|r| (class_of[r.rp_label.as_str()], r.rssi.as_slice()))
        .collect();
    rows.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            a.1.iter()
                .zip(b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let labels: Vec<usize> = rows.iter().map(|r| r.0).collect();
    let features: Vec<Vec<f64>> = rows.iter().map(|r| r.1.to_vec()).collect();
    let n = features.len();
    let n_features = train.dim();

    let binning = build_bins(&features, cfg.n_bins)?;
    let binned = BinnedMatrix::new(&binning, &features);
    drop(features);

    let mut counts = vec![0usize; c];
    for &y in &labels {
        counts[y] += 1;
    }
    let base_score: Vec<f64> = counts.iter().map(|&k| (k as f64 / n as f64).ln()).collect();

    let mut scores = Array2::from_shape_fn((n, c), |(_, k)| base_score[k]);
    let mut grad = Array2::<f64>::zeros((n, c));
    let mut hess = Array2::<f64>::zeros((n, c));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let subset_size = ((cfg.feature_fraction * n_features as f64).ceil() as usize).clamp(1, n_features.max(1));

    let mean_loss = |scores: &Array2<f64>| -> f64 {
        scores
            .outer_iter()
            .zip(&labels)
            .map(|(s, &y)| cross_entropy(s.as_slice().unwrap(), y))
            .sum::<f64>()
            / n as f64
    };
    let mut training_loss = Vec::with_capacity(cfg.iterations + 1);
    training_loss.push(mean_loss(&scores));

    let mut trees = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        for (i, &y) in labels.iter().enumerate() {
            let s = scores.row(i);
            let mut g = grad.row_mut(i);
            let mut h = hess.row_mut(i);
            grad_hess_into(
                s.as_slice().unwrap(),
                y,
                g.as_slice_mut().unwrap(),
                h.as_slice_mut().unwrap(),
            );
        }
        let mut subset = if n_features == 0 {
            Vec::new()
        } else {
            rand::seq::index::sample(&mut rng, n_features, subset_size).into_vec()
        };
        subset.sort_unstable();

        let (tree, leaf_of) = fit_oblivious_tree(&binned, &grad, &hess, cfg.depth, cfg.l2_leaf_reg, &subset);
        for (i, &leaf) in leaf_of.iter().enumerate() {
            let mut row = scores.row_mut(i);
            row.scaled_add(cfg.learning_rate, &tree.leaf_values.row(leaf as usize));
        }
        training_loss.push(mean_loss(&scores));
        trees.push(tree);
    }

    Ok(GbtEnsemble {
        trees,
        learning_rate: cfg.learning_rate,
        link: Link::Softmax,
        class_labels,
        binning,
        base_score,
        config: cfg.clone(),
        training_loss,
    })
}

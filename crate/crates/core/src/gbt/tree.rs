use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::binning::{BinnedMatrix, BinningScheme};

/// One level of an oblivious tree: rows whose bin for `feature` exceeds
/// `threshold` take the 1 branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub feature: u32,
    pub threshold: u8,
}

impl Split {
    /// Placeholder for a level with no usable candidate: every row takes
    /// the 0 branch, since no bin exceeds 255.
    pub const NOOP: Split = Split {
        feature: 0,
        threshold: u8::MAX,
    };

    #[inline]
    pub fn goes_right(&self, bin: u8) -> bool {
        bin > self.threshold
    }
}

/// Symmetric tree: one split per level, `2^depth` leaves, each leaf holding
/// one value per class. Level `k` contributes bit `k` of the leaf index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObliviousTree {
    pub splits: Vec<Split>,
    pub leaf_values: Array2<f64>,
    /// Partition score `Σ_leaves Σ_classes G²/(H+λ)` after each level.
    pub level_gains: Vec<f64>,
}

impl ObliviousTree {
    pub fn depth(&self) -> usize {
        self.splits.len()
    }

    pub fn n_classes(&self) -> usize {
        self.leaf_values.ncols()
    }

    /// Leaf index given a lookup from feature index to bin.
    #[inline]
    pub fn leaf_index(&self, bin_of: impl Fn(usize) -> u8) -> usize {
        self.splits.iter().enumerate().fold(0, |acc, (k, s)| {
            acc | (usize::from(s.goes_right(bin_of(s.feature as usize))) << k)
        })
    }

    pub fn leaf_for_values(&self, scheme: &BinningScheme, x: &[f64]) -> usize {
        self.leaf_index(|f| scheme.bin(f, x[f]))
    }
}

/// Gradient and Hessian sums of a set of rows, per class.
#[inline]
fn partition_score(g: &[f64], h: &[f64], lambda: f64) -> f64 {
    g.iter().zip(h).map(|(&g, &h)| g * g / (h + lambda)).sum()
}

/// Fits one oblivious tree level by level. `grad` and `hess` are
/// `rows × classes`. Each level takes the (feature, threshold) among
/// `feature_subset` that maximizes the score of the refined partition;
/// ties go to the lowest feature, then the lowest threshold. Leaf values
/// are Newton steps `-G/(H+λ)`.
pub fn fit_oblivious_tree(
    binned: &BinnedMatrix,
    grad: &Array2<f64>,
    hess: &Array2<f64>,
    depth: usize,
    lambda: f64,
    feature_subset: &[usize],
) -> (ObliviousTree, Vec<u32>) {
    let n = binned.n_rows();
    let c = grad.ncols();
    let g = grad.as_slice().expect("standard layout gradient");
    let h = hess.as_slice().expect("standard layout hessian");
    let mut leaf_of = vec![0u32; n];
    let mut splits = Vec::with_capacity(depth);
    let mut level_gains = Vec::with_capacity(depth);

    let mut subset: Vec<usize> = feature_subset.to_vec();
    subset.sort_unstable();
    subset.dedup();

    for level in 0..depth {
        let n_leaves = 1usize << level;
        let (tot_g, tot_h) = leaf_sums(&leaf_of, g, h, n_leaves, c);

        let mut best: Option<(f64, Split)> = None;
        for &f in &subset {
            if let Some((gain, t)) = best_threshold(binned, f, &leaf_of, g, h, &tot_g, &tot_h, n_leaves, c, lambda) {
                if best.is_none_or(|(bg, _)| gain > bg) {
                    best = Some((
                        gain,
                        Split {
                            feature: f as u32,
                            threshold: t,
                        },
                    ));
                }
            }
        }

        let split = match best {
            Some((gain, split)) => {
                level_gains.push(gain);
                split
            }
            None => {
                let unsplit: f64 = (0..n_leaves)
                    .map(|l| partition_score(&tot_g[l * c..(l + 1) * c], &tot_h[l * c..(l + 1) * c], lambda))
                    .sum();
                level_gains.push(unsplit);
                Split::NOOP
            }
        };
        if split != Split::NOOP {
            let f = split.feature as usize;
            for (row, leaf) in leaf_of.iter_mut().enumerate() {
                if split.goes_right(binned.get(row, f)) {
                    *leaf |= 1 << level;
                }
            }
        }
        splits.push(split);
    }

    let n_leaves = 1usize << depth;
    let (sum_g, sum_h) = leaf_sums(&leaf_of, g, h, n_leaves, c);
    let leaf_values = Array2::from_shape_fn((n_leaves, c), |(l, k)| {
        let i = l * c + k;
        let v = -sum_g[i] / (sum_h[i] + lambda);
        // turns -0.0 into 0.0
        v + 0.0
    });
    (
        ObliviousTree {
            splits,
            leaf_values,
            level_gains,
        },
        leaf_of,
    )
}

fn leaf_sums(leaf_of: &[u32], g: &[f64], h: &[f64], n_leaves: usize, c: usize) -> (Vec<f64>, Vec<f64>) {
    let mut sg = vec![0.0; n_leaves * c];
    let mut sh = vec![0.0; n_leaves * c];
    for (row, &leaf) in leaf_of.iter().enumerate() {
        let dst = leaf as usize * c;
        let src = row * c;
        for k in 0..c {
            sg[dst + k] += g[src + k];
            sh[dst + k] += h[src + k];
        }
    }
    (sg, sh)
}

/// Best threshold for one feature, or `None` if the feature has a single bin.
#[allow(clippy::too_many_arguments)]
fn best_threshold(
    binned: &BinnedMatrix,
    feature: usize,
    leaf_of: &[u32],
    g: &[f64],
    h: &[f64],
    tot_g: &[f64],
    tot_h: &[f64],
    n_leaves: usize,
    c: usize,
    lambda: f64,
) -> Option<(f64, u8)> {
    let n_bins = binned.bins_for(feature);
    if n_bins < 2 {
        return None;
    }
    let stride = n_bins * c;
    let mut hist_g = vec![0.0; n_leaves * stride];
    let mut hist_h = vec![0.0; n_leaves * stride];
    for &(row, bin) in binned.non_default(feature) {
        let dst = leaf_of[row as usize] as usize * stride + bin as usize * c;
        let src = row as usize * c;
        for k in 0..c {
            hist_g[dst + k] += g[src + k];
            hist_h[dst + k] += h[src + k];
        }
    }
    // The most common bin is whatever the explicit bins leave of each leaf total.
    let default = binned.default_bin(feature) as usize;
    for leaf in 0..n_leaves {
        let base = leaf * stride;
        for k in 0..c {
            let (mut rg, mut rh) = (tot_g[leaf * c + k], tot_h[leaf * c + k]);
            for b in (0..n_bins).filter(|&b| b != default) {
                rg -= hist_g[base + b * c + k];
                rh -= hist_h[base + b * c + k];
            }
            hist_g[base + default * c + k] = rg;
            hist_h[base + default * c + k] = rh.max(0.0);
        }
    }

    let mut gains = vec![0.0; n_bins - 1];
    let mut left_g = vec![0.0; c];
    let mut left_h = vec![0.0; c];
    for leaf in 0..n_leaves {
        let base = leaf * stride;
        let (lg_tot, lh_tot) = (&tot_g[leaf * c..(leaf + 1) * c], &tot_h[leaf * c..(leaf + 1) * c]);
        left_g.fill(0.0);
        left_h.fill(0.0);
        for (t, gain) in gains.iter_mut().enumerate() {
            let mut score = 0.0;
            for k in 0..c {
                left_g[k] += hist_g[base + t * c + k];
                left_h[k] += hist_h[base + t * c + k];
                let rg = lg_tot[k] - left_g[k];
                let rh = (lh_tot[k] - left_h[k]).max(0.0);
                score += left_g[k] * left_g[k] / (left_h[k] + lambda) + rg * rg / (rh + lambda);
            }
            *gain += score;
        }
    }
    let mut best = 0;
    for t in 1..gains.len() {
        if gains[t] > gains[best] {
            best = t;
        }
    }
    Some((gains[best], best as u8))
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature bin edges. The bin of `v` is the number of edges strictly
/// below `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    n_bins: usize,
    edges: Vec<Vec<f64>>,
}

impl BinningScheme {
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_features(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, feature: usize) -> &[f64] {
        &self.edges[feature]
    }

    /// Number of occupied bins for `feature` (edges + 1).
    pub fn bins_for(&self, feature: usize) -> usize {
        self.edges[feature].len() + 1
    }

    #[inline]
    pub fn bin(&self, feature: usize, value: f64) -> u8 {
        self.edges[feature].partition_point(|&e| e < value) as u8
    }

    pub fn bin_row(&self, row: &[f64]) -> Vec<u8> {
        row.iter().enumerate().map(|(f, &v)| self.bin(f, v)).collect()
    }
}

/// Quantile edges over each feature's distinct values. Features with at
/// most `n_bins` distinct values get one edge between each consecutive
/// pair; constant features get none.
pub fn build_bins(rows: &[Vec<f64>], n_bins: usize) -> Result<BinningScheme> {
    if !(2..=256).contains(&n_bins) {
        return Err(Error::Config(format!("n_bins must be in 2..=256, got {n_bins}")));
    }
    let n_features = rows.first().ok_or(Error::Empty("binning input"))?.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n_features) {
        return Err(Error::Shape {
            expected: n_features,
            actual: bad.len(),
            context: "feature row width",
        });
    }
    let edges = (0..n_features)
        .into_par_iter()
        .map(|f| {
            let mut distinct: Vec<f64> = rows.iter().map(|r| r[f]).collect();
            distinct.sort_unstable_by(f64::total_cmp);
            distinct.dedup();
            feature_edges(&distinct, n_bins)
        })
        .collect();
    Ok(BinningScheme { n_bins, edges })
}

fn feature_edges(distinct: &[f64], n_bins: usize) -> Vec<f64> {
    let m = distinct.len();
    let mid = |i: usize| distinct[i - 1] + (distinct[i] - distinct[i - 1]) / 2.0;
    let mut edges: Vec<f64> = if m <= n_bins {
        (1..m).map(mid).collect()
    } else {
        (1..n_bins).map(|i| mid(i * m / n_bins)).collect()
    };
    edges.dedup();
    edges
}

/// Column-major binned training matrix with a sparse view per feature:
/// entries outside the feature's most common bin.
#[derive(Debug, Clone)]
pub struct BinnedMatrix {
    n_rows: usize,
    bins: Vec<u8>,
    bins_per_feature: Vec<usize>,
    default_bin: Vec<u8>,
    sparse: Vec<Vec<(u32, u8)>>,
}

impl BinnedMatrix {
    pub fn new(scheme: &BinningScheme, rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_features = scheme.n_features();
        let columns: Vec<(Vec<u8>, u8, Vec<(u32, u8)>)> = (0..n_features)
            .into_par_iter()
            .map(|f| {
                let col: Vec<u8> = rows.iter().map(|r| scheme.bin(f, r[f])).collect();
                let mut counts = [0usize; 256];
                for &b in &col {
                    counts[b as usize] += 1;
                }
                let mut default = 0u8;
                for b in 1..scheme.bins_for(f) {
                    if counts[b] > counts[default as usize] {
                        default = b as u8;
                    }
                }
                let sparse = col
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| b != default)
                    .map(|(i, &b)| (i as u32, b))
                    .collect();
                (col, default, sparse)
            })
            .collect();
        let mut bins = Vec::with_capacity(n_rows * n_features);
        let mut default_bin = Vec::with_capacity(n_features);
        let mut sparse = Vec::with_capacity(n_features);
        for (col, d, s) in columns {
            bins.extend_from_slice(&col);
            default_bin.push(d);
            sparse.push(s);
        }
        Self {
            n_rows,
            bins,
            bins_per_feature: (0..n_features).map(|f| scheme.bins_for(f)).collect(),
            default_bin,
            sparse,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.bins_per_feature.len()
    }

    #[inline]
    pub fn get(&self, row: usize, feature: usize) -> u8 {
        self.bins[feature * self.n_rows + row]
    }

    pub fn bins_for(&self, feature: usize) -> usize {
        self.bins_per_feature[feature]
    }

    pub(crate) fn default_bin(&self, feature: usize) -> u8 {
        self.default_bin[feature]
    }

    pub(crate) fn non_default(&self, feature: usize) -> &[(u32, u8)] {
        &self.sparse[feature]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn constant_feature_has_no_edges() {
        let s = build_bins(&column(&[0.3, 0.3, 0.3]), 32).unwrap();
        assert!(s.edges(0).is_empty());
        assert_eq!(s.bin(0, 0.3), 0);
        assert_eq!(s.bin(0, 0.9), 0);
    }

    #[test]
    fn two_values_split_at_midpoint() {
        let s = build_bins(&column(&[0.0, 1.0, 1.0, 0.0]), 2).unwrap();
        assert_eq!(s.edges(0), &[0.5]);
        assert_eq!(s.bin(0, 0.0), 0);
        assert_eq!(s.bin(0, 0.5), 0);
        assert_eq!(s.bin(0, 1.0), 1);
    }

    #[test]
    fn many_values_cap_bins() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let s = build_bins(&column(&values), 32).unwrap();
        assert_eq!(s.edges(0).len(), 31);
        assert!(values.iter().all(|&v| (s.bin(0, v) as usize) < 32));
    }

    #[test]
    fn sparse_view_matches_dense() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![if i % 7 == 0 { 0.5 } else { 0.0 }, (i % 3) as f64]).collect();
        let s = build_bins(&rows, 8).unwrap();
        let m = BinnedMatrix::new(&s, &rows);
        for f in 0..2 {
            let d = m.default_bin(f);
            let mut rebuilt = vec![d; 50];
            for &(r, b) in m.non_default(f) {
                rebuilt[r as usize] = b;
            }
            let dense: Vec<u8> = (0..50).map(|r| m.get(r, f)).collect();
            assert_eq!(rebuilt, dense);
        }
        assert_eq!(m.default_bin(0), 0);
    }

    proptest! {
        #[test]
        fn edges_strictly_increase_and_are_order_free(
            values in prop::collection::vec(0.0f64..=1.0, 1..200),
            n_bins in 2usize..40,
            rot in 0usize..200,
        ) {
            let s = build_bins(&column(&values), n_bins).unwrap();
            prop_assert!(s.edges(0).windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s.edges(0).len() < n_bins);
            let mut permuted = values.clone();
            let k = rot % permuted.len();
            permuted.rotate_left(k);
            permuted.reverse();
            prop_assert_eq!(build_bins(&column(&permuted), n_bins).unwrap(), s);
        }
    }
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rssloc_core::data::{parse_uji_csv, UjiOptions};
use rssloc_core::synthetic::{simulate_uji_csv, SurveyConfig};
use rssloc_core::{ApRegistry, FingerprintDatabase, FingerprintRecord, Location, RssiVector};

pub fn registry(dim: usize) -> ApRegistry {
    ApRegistry::new((0..dim).map(|i| format!("AP{i:03}")).collect()).unwrap()
}

/// `n_rp` reference points on a line, 2 m apart. Each point has its own
/// random base fingerprint; samples add small noise to it.
pub fn line_db(n_rp: usize, per_rp: usize, dim: usize, device: &str, seed: u64) -> FingerprintDatabase {
    let mut base_rng = ChaCha8Rng::seed_from_u64(1_000 + seed / 1_000);
    let bases: Vec<Vec<f64>> = (0..n_rp)
        .map(|_| {
            (0..dim)
                .map(|_| if base_rng.random_bool(0.6) { base_rng.random_range(0.1..0.7) } else { 0.0 })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for (i, base) in bases.iter().enumerate() {
        for _ in 0..per_rp {
            let v: Vec<f64> = base
                .iter()
                .map(|&b| if b > 0.0 { (b + rng.random_range(-0.03..0.03)).clamp(0.01, 1.0) } else { 0.0 })
                .collect();
            records.push(FingerprintRecord {
                rssi: RssiVector::new(v).unwrap(),
                location: Location::new(2.0 * i as f64, 0.0, 0.0),
                rp_label: format!("rp{i:02}"),
                device: device.to_owned(),
                synthetic: false,
            });
        }
    }
    FingerprintDatabase::new(registry(dim), records).unwrap()
}

/// Same reference points and base fingerprints as `line_db` with the same
/// `seed / 1000`, measured by several devices.
pub fn multi_device_db(n_rp: usize, per_rp: usize, dim: usize, devices: &[&str], seed: u64) -> FingerprintDatabase {
    let mut records = Vec::new();
    for (k, d) in devices.iter().enumerate() {
        records.extend(line_db(n_rp, per_rp, dim, d, seed + k as u64 + 1).records().iter().cloned());
    }
    FingerprintDatabase::new(registry(dim), records).unwrap()
}

pub fn simulated_survey(cfg: &SurveyConfig) -> FingerprintDatabase {
    parse_uji_csv(simulate_uji_csv(cfg).as_bytes(), "simulated survey", &UjiOptions::default()).unwrap()
}

/// Brute-force split search for one tree level. `bins` is rows × features,
/// `g`/`h` are rows × classes. Every row starts in the leaf given by
/// `prior` splits; each candidate (feature, threshold) with threshold in
/// `0..bins_for(feature) - 1` is scored as Σ_leaves Σ_classes G²/(H+λ).
/// Returns the best score, or the unsplit score when no candidate exists.
pub fn exhaustive_level_max(
    bins: &[Vec<u8>],
    bins_for: &[usize],
    g: &[Vec<f64>],
    h: &[Vec<f64>],
    prior: &[rssloc_core::gbt::Split],
    lambda: f64,
) -> f64 {
    let c = g[0].len();
    let level = prior.len();
    let base: Vec<usize> = bins
        .iter()
        .map(|row| {
            prior
                .iter()
                .enumerate()
                .map(|(k, s)| usize::from(row[s.feature as usize] > s.threshold) << k)
                .sum()
        })
        .collect();
    let score = |leaf_of: &dyn Fn(usize) -> usize, n_leaves: usize| -> f64 {
        let mut total = 0.0;
        for leaf in 0..n_leaves {
            for k in 0..c {
                let (mut sg, mut sh) = (0.0, 0.0);
                for i in 0..bins.len() {
                    if leaf_of(i) == leaf {
                        sg += g[i][k];
                        sh += h[i][k];
                    }
                }
                total += sg * sg / (sh + lambda);
            }
        }
        total
    };
    let mut best: Option<f64> = None;
    for (f, &nb) in bins_for.iter().enumerate() {
        for t in 0..nb.saturating_sub(1) {
            let s = score(&|i| base[i] | (usize::from(bins[i][f] > t as u8) << level), 2 << level);
            if best.is_none_or(|b| s > b) {
                best = Some(s);
            }
        }
    }
    best.unwrap_or_else(|| score(&|i| base[i], 1 << level))
}

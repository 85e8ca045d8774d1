use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FingerprintDatabase;
use crate::error::{Error, Result};

/// Per reference point, draws `train_per_rp` records for training and a
/// disjoint `test_per_rp` for testing. Unselected records are dropped.
pub fn split_per_rp(
    db: &FingerprintDatabase,
    train_per_rp: usize,
    test_per_rp: usize,
    seed: u64,
) -> Result<(FingerprintDatabase, FingerprintDatabase)> {
    let required = train_per_rp + test_per_rp;
    let mut by_rp: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in db.records().iter().enumerate() {
        by_rp.entry(r.rp_label.as_str()).or_default().push(i);
    }
    let deficient: Vec<String> = by_rp
        .iter()
        .filter(|(_, idx)| idx.len() < required)
        .map(|(label, _)| label.to_string())
        .collect();
    if !deficient.is_empty() {
        return Err(Error::InsufficientSamples { required, deficient });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for (_, mut idx) in by_rp {
        idx.shuffle(&mut rng);
        train_idx.extend_from_slice(&idx[..train_per_rp]);
        test_idx.extend_from_slice(&idx[train_per_rp..required]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize]| db.derive(idx.iter().map(|&i| db.records()[i].clone()).collect());
    Ok((pick(&train_idx), pick(&test_idx)))
}

/// Filters `db` into the records of `train_devices` and of `test_devices`.
/// Overlapping sets are allowed and yield the same records on both sides.
pub fn split_by_device<S: AsRef<str>>(
    db: &FingerprintDatabase,
    train_devices: &[S],
    test_devices: &[S],
) -> Result<(FingerprintDatabase, FingerprintDatabase)> {
    if train_devices.is_empty() || test_devices.is_empty() {
        return Err(Error::Config("device sets must be non-empty".into()));
    }
    let known: BTreeSet<String> = db.devices().into_iter().collect();
    let to_set = |devices: &[S]| -> Result<BTreeSet<String>> {
        devices
            .iter()
            .map(|d| {
                let d = d.as_ref();
                if known.contains(d) {
                    Ok(d.to_owned())
                } else {
                    Err(Error::UnknownDevice(d.to_owned()))
                }
            })
            .collect()
    };
    let train = to_set(train_devices)?;
    let test = to_set(test_devices)?;
    Ok((
        db.filter(|r| train.contains(&r.device)),
        db.filter(|r| test.contains(&r.device)),
    ))
}

mod common;

use rssloc_core::artifact::{self, FORMAT_VERSION, MAGIC};
use rssloc_core::gbt::fit_ensemble;
use rssloc_core::localization::train_model;
use rssloc_core::sae::{fine_tune, greedy_pretrain};
use rssloc_core::{GbtConfig, GbtEnsemble, LocalizationModel, SaeConfig, StackedAutoencoder};

fn model() -> LocalizationModel {
    let db = common::line_db(5, 4, 10, "A", 6);
    let sae = SaeConfig {
        epochs: 3,
        ..SaeConfig::default()
    };
    let gbt = GbtConfig {
        iterations: 5,
        depth: 3,
        ..GbtConfig::default()
    };
    train_model(&db, Some(&sae), &gbt).unwrap()
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn model_round_trips_bit_exactly() {
    let m = model();
    let bytes = artifact::encode(&m).unwrap();
    assert_eq!(&bytes[..8], &MAGIC);
    assert_eq!(&bytes[8..12], &FORMAT_VERSION.to_le_bytes());
    let back: LocalizationModel = artifact::decode(&bytes).unwrap();
    assert_eq!(back, m);
    for (a, b) in m.ensemble.trees.iter().zip(&back.ensemble.trees) {
        assert_eq!(bits(a.leaf_values.as_slice().unwrap()), bits(b.leaf_values.as_slice().unwrap()));
    }
    let (sa, sb) = (m.sae.as_ref().unwrap(), back.sae.as_ref().unwrap());
    for (a, b) in sa.ae2.layers().iter().zip(sb.ae2.layers()) {
        assert_eq!(bits(a.weights.as_slice().unwrap()), bits(b.weights.as_slice().unwrap()));
    }
    assert_eq!(artifact::encode(&back).unwrap(), bytes);
}

#[test]
fn standalone_parts_round_trip_through_files() {
    let db = common::line_db(4, 3, 8, "A", 2);
    let cfg = SaeConfig {
        epochs: 2,
        ..SaeConfig::default()
    };
    let sae = fine_tune(greedy_pretrain(&db.fingerprints(), &cfg).unwrap(), &db.fingerprints(), &cfg).unwrap();
    let ens = fit_ensemble(&db, &GbtConfig { iterations: 3, depth: 2, ..GbtConfig::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    artifact::save(&sae, dir.path().join("sae.bin")).unwrap();
    artifact::save(&ens, dir.path().join("gbt.bin")).unwrap();
    assert_eq!(artifact::load::<StackedAutoencoder>(dir.path().join("sae.bin")).unwrap(), sae);
    assert_eq!(artifact::load::<GbtEnsemble>(dir.path().join("gbt.bin")).unwrap(), ens);
    // kind tags are checked
    assert!(artifact::load::<GbtEnsemble>(dir.path().join("sae.bin")).is_err());
    assert!(artifact::load::<LocalizationModel>(dir.path().join("missing.bin")).is_err());
}

#[test]
fn mismatched_version_is_refused() {
    let mut bytes = artifact::encode(&model()).unwrap();
    bytes[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
    let err = artifact::decode::<LocalizationModel>(&bytes).unwrap_err();
    assert!(err.to_string().contains("version"), "{err}");
}

#[test]
fn corrupt_files_are_refused() {
    let bytes = artifact::encode(&model()).unwrap();
    let mut bad_magic = bytes.clone();
    bad_magic[0] ^= 0xff;
    assert!(artifact::decode::<LocalizationModel>(&bad_magic).is_err());
    assert!(artifact::decode::<LocalizationModel>(&bytes[..10]).is_err());
    assert!(artifact::decode::<LocalizationModel>(&bytes[..bytes.len() / 2]).is_err());
}

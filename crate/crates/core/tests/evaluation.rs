mod common;

use proptest::prelude::*;
use rssloc_core::evaluation::{
    ablation_sae, cross_device_matrix, emit_report, error_stats, latency_benchmark, read_json_report, ErrorMatrix,
    ErrorStats, Report, ReportFormat, SplitSettings,
};
use rssloc_core::localization::{build_training_set, train_model};
use rssloc_core::{Error, GbtConfig, SaeConfig, Scan};

fn quick_gbt() -> GbtConfig {
    GbtConfig {
        iterations: 8,
        depth: 4,
        ..GbtConfig::default()
    }
}

fn quick_sae() -> SaeConfig {
    SaeConfig {
        epochs: 5,
        batch_size: 8,
        ..SaeConfig::default()
    }
}

#[test]
fn error_stats_examples() {
    let s = error_stats(&[5.0]).unwrap();
    assert_eq!((s.min, s.mean, s.max, s.n), (5.0, 5.0, 5.0, 1));
    let s = error_stats(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!((s.min, s.mean, s.max), (1.0, 2.0, 3.0));
    let s = error_stats(&[0.0, 0.0, 0.0]).unwrap();
    assert_eq!((s.min, s.mean, s.max), (0.0, 0.0, 0.0));
    assert!(error_stats(&[]).is_err());
}

proptest! {
    #[test]
    fn error_stats_match_naive(errors in prop::collection::vec(0.0f64..100.0, 1..50)) {
        let s = error_stats(&errors).unwrap();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &e in &errors {
            min = min.min(e);
            max = max.max(e);
            sum += e;
        }
        prop_assert_eq!(s.min, min);
        prop_assert_eq!(s.max, max);
        prop_assert_eq!(s.mean, sum / errors.len() as f64);
        prop_assert_eq!(s.n, errors.len());
        prop_assert!(s.min <= s.mean && s.mean <= s.max);
    }
}

#[test]
fn two_devices_give_four_cells() {
    let db = common::multi_device_db(5, 6, 8, &["A", "B"], 3_000);
    let m = cross_device_matrix(&db, &["A", "B"], None, &quick_gbt(), SplitSettings::default()).unwrap();
    assert_eq!(m.devices, vec!["A", "B"]);
    assert_eq!(m.cells.len(), 2);
    for (i, row) in m.cells.iter().enumerate() {
        assert_eq!(row.len(), 2);
        for (j, cell) in row.iter().enumerate() {
            let s = cell.stats.unwrap();
            assert_eq!(s.n, if i == j { 5 } else { 30 });
            assert!(s.min >= 0.0 && s.max.is_finite());
        }
    }
    let summary = m.summary().unwrap();
    assert_eq!(summary.pooled.n, 70);
}

#[test]
fn cells_ignore_unrelated_devices() {
    let two = common::multi_device_db(5, 6, 8, &["A", "B"], 3_000);
    let three = common::multi_device_db(5, 6, 8, &["A", "B", "C"], 3_000);
    let a = cross_device_matrix(&two, &["A", "B"], None, &quick_gbt(), SplitSettings::default()).unwrap();
    let b = cross_device_matrix(&three, &["A", "B"], None, &quick_gbt(), SplitSettings::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn short_devices_give_absent_diagonal_cells() {
    let db = common::multi_device_db(4, 3, 6, &["A", "B"], 3_000);
    let m = cross_device_matrix(&db, &["A", "B"], None, &quick_gbt(), SplitSettings::default()).unwrap();
    assert!(m.cells[0][0].stats.is_none());
    assert!(m.cells[0][0].absent_reason.as_deref().unwrap().contains("6"));
    assert!(m.cells[0][1].stats.is_some());
}

#[test]
fn unknown_device_is_an_error() {
    let db = common::multi_device_db(4, 6, 6, &["A"], 3_000);
    let err = cross_device_matrix(&db, &["A", "Z"], None, &quick_gbt(), SplitSettings::default()).unwrap_err();
    assert!(matches!(err, Error::UnknownDevice(d) if d == "Z"));
}

#[test]
fn ablation_arms_differ_only_by_augmentation() {
    let train = common::line_db(5, 4, 10, "A", 4_000);
    let test = common::line_db(5, 2, 10, "B", 4_001);
    let r = ablation_sae(&train, &test, &quick_sae(), &quick_gbt()).unwrap();
    assert_eq!(r.with_training_rows, 2 * train.len());
    assert_eq!(r.without_training_rows, train.len());
    assert_eq!(r.without_training_hash, train.content_hash());
    assert_eq!(r.dataset_hash, train.content_hash());
    assert_ne!(r.with_training_hash, r.without_training_hash);

    let (_, augmented) = build_training_set(&train, Some(&quick_sae())).unwrap();
    assert_eq!(augmented.content_hash(), r.with_training_hash);
    assert_eq!(&augmented.records()[..train.len()], train.records());

    let expected = (r.without_sae.mean - r.with_sae.mean) / r.without_sae.mean;
    match r.relative_mean_delta {
        Some(d) => assert_eq!(d, expected),
        None => assert_eq!(r.without_sae.mean, 0.0),
    }
}

#[test]
fn latency_average_is_the_mean_of_samples() {
    let db = common::line_db(4, 3, 6, "A", 5);
    let model = train_model(&db, None, &quick_gbt()).unwrap();
    let one = vec![Scan::new(vec![("AP001".into(), -60.0)])];
    let r = latency_benchmark(&model, &one, 1).unwrap();
    assert_eq!(r.per_query_ms.len(), 1);
    assert_eq!(r.average_ms, r.per_query_ms[0]);

    let many = vec![one[0].clone(), Scan::new(vec![("AP002".into(), -45.0)]), Scan::default()];
    let r = latency_benchmark(&model, &many, 4).unwrap();
    assert_eq!(r.per_query_ms.len(), 12);
    assert_eq!(r.average_ms, r.per_query_ms.iter().sum::<f64>() / 12.0);
    assert!(r.per_query_ms.iter().all(|t| *t >= 0.0));
    assert!(latency_benchmark(&model, &[], 1).is_err());
    assert!(latency_benchmark(&model, &many, 0).is_err());
}

fn sample_matrix() -> ErrorMatrix {
    let db = common::multi_device_db(5, 6, 8, &["A", "B"], 3_000);
    cross_device_matrix(&db, &["A", "B"], None, &quick_gbt(), SplitSettings::default()).unwrap()
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let report = Report {
        provenance: serde_json::json!({"gbt": quick_gbt(), "seed": 42}),
        result: sample_matrix(),
    };
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    emit_report(&report, &csv_a, ReportFormat::Csv).unwrap();
    emit_report(&report, &csv_b, ReportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&csv_a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&csv_b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "train\\test,A,B");
    assert!(lines[1].starts_with("A,") && lines[2].starts_with("B,"));

    let json = dir.path().join("m.json");
    emit_report(&report, &json, ReportFormat::Json).unwrap();
    let back: Report<ErrorMatrix> = read_json_report(&json).unwrap();
    assert_eq!(back, report);

    let stats = Report {
        provenance: serde_json::Value::Null,
        result: error_stats(&[0.1, 0.7, 2.5]).unwrap(),
    };
    let path = dir.path().join("s.json");
    emit_report(&stats, &path, ReportFormat::Json).unwrap();
    let back: Report<ErrorStats> = read_json_report(&path).unwrap();
    assert_eq!(back, stats);

    assert!(emit_report(&stats, dir.path().join("missing/dir/s.json"), ReportFormat::Json).is_err());
    assert!("xml".parse::<ReportFormat>().is_err());
}

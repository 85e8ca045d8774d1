use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use ndarray::Array2;
use rssloc_bench::{model, phone, quick_sae, survey, tree_inputs};
use rssloc_core::gbt::{fit_ensemble, fit_oblivious_tree};
use rssloc_core::sae::{fine_tune, greedy_pretrain};
use rssloc_core::{GbtConfig, Scan};

fn predict(c: &mut Criterion) {
    let db = survey();
    let train = phone(&db, "13");
    let test = phone(&db, "14");
    let m = model(&train, None);
    let x = test.records()[0].rssi.as_slice().to_vec();
    let ids = train.registry().ids();
    let scan = Scan::new(
        x.iter()
            .zip(ids)
            .filter(|(v, _)| **v > 0.0)
            .map(|(v, id)| (id.clone(), rssloc_core::data::denormalize_rssi(*v)))
            .collect(),
    );
    c.bench_function("predict_fingerprint", |b| b.iter(|| m.predict_fingerprint(black_box(&x)).unwrap()));
    c.bench_function("predict_scan", |b| b.iter(|| m.predict(black_box(&scan)).unwrap()));
}

fn tree_fit(c: &mut Criterion) {
    let db = survey();
    let train = phone(&db, "13");
    let t = tree_inputs(&train, 32);
    let mut g = c.benchmark_group("gbt");
    g.sample_size(20);
    g.bench_function("oblivious_tree_depth7", |b| {
        b.iter(|| fit_oblivious_tree(&t.binned, &t.grad, &t.hess, 7, 5.0, &t.features))
    });
    let cfg = GbtConfig {
        iterations: 5,
        ..GbtConfig::default()
    };
    g.bench_function("ensemble_5_iterations", |b| b.iter(|| fit_ensemble(black_box(&train), &cfg).unwrap()));
    g.finish();
}

fn sae(c: &mut Criterion) {
    let db = survey();
    let train = phone(&db, "13");
    let data = train.fingerprints();
    let cfg = quick_sae();
    let sae = fine_tune(greedy_pretrain(&data, &cfg).unwrap(), &data, &cfg).unwrap();
    let batch = Array2::from_shape_vec((data.len(), train.dim()), data.concat()).unwrap();
    let mut g = c.benchmark_group("sae");
    g.bench_function("reconstruct_one", |b| b.iter(|| sae.reconstruct(black_box(&data[0])).unwrap()));
    g.bench_function("reconstruct_batch_720", |b| b.iter(|| sae.reconstruct_batch(black_box(&batch)).unwrap()));
    g.sample_size(10);
    g.bench_function("fine_tune_one_epoch", |b| {
        let one = rssloc_core::SaeConfig {
            epochs: 1,
            ..cfg.clone()
        };
        b.iter_batched(|| sae.clone(), |s| fine_tune(s, &data, &one).unwrap(), BatchSize::LargeInput)
    });
    g.finish();
}

criterion_group!(benches, predict, tree_fit, sae);
criterion_main!(benches);

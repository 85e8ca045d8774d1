//! Fixtures shared by the criterion benches.

use ndarray::Array2;
use rssloc_core::data::{parse_uji_csv, UjiOptions};
use rssloc_core::gbt::{build_bins, softmax_grad_hess, BinnedMatrix};
use rssloc_core::synthetic::{simulate_uji_csv, SurveyConfig};
use rssloc_core::{FingerprintDatabase, GbtConfig, LocalizationModel, SaeConfig};

/// Simulated two-phone survey: 120 reference points, 720 records per phone.
pub fn survey() -> FingerprintDatabase {
    let csv = simulate_uji_csv(&SurveyConfig::default());
    parse_uji_csv(csv.as_bytes(), "simulated survey", &UjiOptions::default()).expect("simulated survey parses")
}

pub fn phone(db: &FingerprintDatabase, id: &str) -> FingerprintDatabase {
    db.filter(|r| r.device == id)
}

/// Short SAE schedule so fixture setup stays in seconds.
pub fn quick_sae() -> SaeConfig {
    SaeConfig {
        epochs: 5,
        ..SaeConfig::default()
    }
}

pub fn model(train: &FingerprintDatabase, sae: Option<&SaeConfig>) -> LocalizationModel {
    rssloc_core::localization::train_model(train, sae, &GbtConfig::default()).expect("fixture model trains")
}

/// Binned training rows with the gradients and Hessians of the first
/// boosting round (all scores zero).
pub struct TreeInputs {
    pub binned: BinnedMatrix,
    pub grad: Array2<f64>,
    pub hess: Array2<f64>,
    pub features: Vec<usize>,
}

pub fn tree_inputs(train: &FingerprintDatabase, n_bins: usize) -> TreeInputs {
    let rows = train.fingerprints();
    let scheme = build_bins(&rows, n_bins).expect("bins");
    let binned = BinnedMatrix::new(&scheme, &rows);
    let labels = train.rp_labels();
    let c = labels.len();
    let mut grad = Array2::zeros((rows.len(), c));
    let mut hess = Array2::zeros((rows.len(), c));
    let zero = vec![0.0; c];
    for (i, r) in train.records().iter().enumerate() {
        let class = labels.binary_search(&r.rp_label).expect("label present");
        let (g, h) = softmax_grad_hess(&zero, class);
        grad.row_mut(i).assign(&ndarray::ArrayView1::from(&g));
        hess.row_mut(i).assign(&ndarray::ArrayView1::from(&h));
    }
    TreeInputs {
        binned,
        grad,
        hess,
        features: (0..train.dim()).collect(),
    }
}

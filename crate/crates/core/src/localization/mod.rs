//! End-to-end localization: augmentation, boosting, prediction and the
//! nearest-neighbour baseline.

mod knn;
mod metric;
mod model;
mod scan;

pub use knn::knn_predict;
pub use metric::euclidean_error;
pub use model::{build_training_set, predict_location, train_model, LocalizationModel, ModelMetadata, Prediction};
pub use scan::Scan;

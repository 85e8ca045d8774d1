//! Experiment harness: cross-device error matrices, error summaries,
//! augmentation ablation, inference latency and report files.

mod ablation;
mod latency;
mod matrix;
mod report;
mod stats;

pub use ablation::{ablation_sae, AblationResult};
pub use latency::{latency_benchmark, LatencyReport, WARMUP_QUERIES};
pub use matrix::{cross_device_matrix, evaluate_model, knn_errors, ErrorMatrix, MatrixCell, SplitSettings};
pub use report::{emit_report, read_json_report, run_dir_name, Report, ReportFormat, Tabular};
pub use stats::{error_stats, ErrorStats};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::{predict_location, LocalizationModel, Scan};

/// Untimed predictions run before measurement starts.
pub const WARMUP_QUERIES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    /// Wall-clock time of each timed prediction, in milliseconds.
    pub per_query_ms: Vec<f64>,
    pub average_ms: f64,
    pub warmup_queries: usize,
}

/// Times single predictions: every query, `repetitions` times, after
/// [`WARMUP_QUERIES`] untimed calls.
pub fn latency_benchmark(model: &LocalizationModel, queries: &[Scan], repetitions: usize) -> Result<LatencyReport> {
    if queries.is_empty() {
        return Err(Error::Empty("latency queries"));
    }
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    for q in queries.iter().cycle().take(WARMUP_QUERIES) {
        std::hint::black_box(predict_location(model, q)?);
    }
    let mut per_query_ms = Vec::with_capacity(queries.len() * repetitions);
    for _ in 0..repetitions {
        for q in queries {
            let start = Instant::now();
            let p = predict_location(model, q)?;
            let elapsed = start.elapsed();
            std::hint::black_box(p);
            per_query_ms.push(elapsed.as_secs_f64() * 1e3);
        }
    }
    let average_ms = per_query_ms.iter().sum::<f64>() / per_query_ms.len() as f64;
    Ok(LatencyReport {
        per_query_ms,
        average_ms,
        warmup_queries: WARMUP_QUERIES,
    })
}

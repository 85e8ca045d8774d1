use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum, mean and maximum of a set of localization errors (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub n: usize,
}

pub fn error_stats(errors: &[f64]) -> Result<ErrorStats> {
    if errors.is_empty() {
        return Err(Error::Empty("error list"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &e in errors {
        min = min.min(e);
        max = max.max(e);
        sum += e;
    }
    // Rounding can push the mean a hair outside [min, max] for near-constant input.
    let mean = (sum / errors.len() as f64).clamp(min, max);
    Ok(ErrorStats {
        min,
        mean,
        max,
        n: errors.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
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
        fn matches_naive_recomputation(errors in prop::collection::vec(0.0f64..100.0, 1..200)) {
            let s = error_stats(&errors).unwrap();
            let mut sorted = errors.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assert_eq!(s.min, sorted[0]);
            prop_assert_eq!(s.max, *sorted.last().unwrap());
            let naive = errors.iter().sum::<f64>() / errors.len() as f64;
            prop_assert_eq!(s.mean, naive.clamp(s.min, s.max));
            prop_assert!(s.min <= s.mean && s.mean <= s.max);
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stats::sample::sorted;

/// Fewest samples accepted by [`vr_tail`].
pub const MIN_TAIL_SAMPLES: usize = 100;

/// Empirical lower-tail probabilities `P(V <= eps)` on a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub sample_count: usize,
}

pub fn vr_tail(samples: &[f64], eps_grid: &[f64]) -> Result<TailCurve> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(invalid(format!(
            "{} samples, need at least {MIN_TAIL_SAMPLES}",
            samples.len()
        )));
    }
    let s = sorted(samples.to_vec());
    let n = s.len() as f64;
    let mut thresholds = eps_grid.to_vec();
    thresholds.sort_by(f64::total_cmp);
    let probabilities = thresholds
        .iter()
        .map(|&e| s.partition_point(|&v| v <= e) as f64 / n)
        .collect();
    Ok(TailCurve { thresholds, probabilities, sample_count: s.len() })
}

impl TailCurve {
    pub fn at(&self, eps: f64) -> Option<f64> {
        self.thresholds.iter().position(|&t| t == eps).map(|k| self.probabilities[k])
    }

    pub fn is_monotone(&self) -> bool {
        self.probabilities.windows(2).all(|w| w[0] <= w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let s: Vec<f64> = (1..=200).map(|k| k as f64 / 100.0).collect();
        let t = vr_tail(&s, &[0.001, 0.5, 5.0]).unwrap();
        assert_eq!(t.probabilities, vec![0.0, 0.25, 1.0]);
        assert!(t.is_monotone());
        assert_eq!(t.at(0.5), Some(0.25));
        assert!(vr_tail(&s[..50], &[0.1]).is_err());
    }
}

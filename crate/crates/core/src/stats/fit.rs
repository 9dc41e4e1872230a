use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Least-squares slope of `log(means)` against `log(scales)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub scales: Vec<f64>,
    pub means: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
}

pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    if pairs.iter().any(|&(s, m)| !(s > 0.0) || !(m > 0.0) || !s.is_finite() || !m.is_finite()) {
        return Err(invalid("exponent fit needs positive finite scales and means"));
    }
    let mut distinct: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(invalid(format!("exponent fit needs at least 3 distinct scales, got {}", distinct.len())));
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if xs.len() > 2 { (ssr / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    let r2 = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Ok(ExponentFit {
        scales: pairs.iter().map(|p| p.0).collect(),
        means: pairs.iter().map(|p| p.1).collect(),
        slope,
        intercept,
        stderr,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = (0..10).map(|k| {
            let x = 2f64.powi(k);
            (x, 7.0 * x.powf(0.6))
        }).collect();
        let fit = fit_exponent(&pairs).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let fit = fit_exponent(&[(1.0, 3.0), (2.0, 3.0), (4.0, 3.0)]).unwrap();
        assert!(fit.slope.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0), (2.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 2.0)]).is_err());
        assert!(fit_exponent(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 2.0)]).is_err());
    }

    proptest! {
        #[test]
        fn recovers_synthetic_slopes(slope in -3.0f64..3.0, c in 0.01f64..100.0, k in 3usize..12) {
            let pairs: Vec<(f64, f64)> = (0..k).map(|i| {
                let x = 1.5f64.powi(i as i32) * 0.3;
                (x, c * x.powf(slope))
            }).collect();
            let fit = fit_exponent(&pairs).unwrap();
            prop_assert!((fit.slope - slope).abs() < 1e-12);
        }
    }
}

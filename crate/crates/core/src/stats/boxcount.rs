use std::collections::HashSet;

use crate::error::{invalid, Result};
use crate::rescale::RescaledPoint;
use crate::stats::fit::{fit_exponent, ExponentFit};

fn check_scales(scales: &[f64]) -> Result<()> {
    let mut s: Vec<f64> = scales.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    if s.len() < 3 || s.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(invalid("box counting needs at least 3 distinct positive box sizes"));
    }
    Ok(())
}

/// `(1 / delta, occupied boxes)` for each box size, boxes of side `delta`
/// in the `(x, t)` plane.
pub fn box_counts(points: &[RescaledPoint], box_sizes: &[f64]) -> Vec<(f64, f64)> {
    box_sizes
        .iter()
        .map(|&d| {
            let occupied: HashSet<(i64, i64)> = points
                .iter()
                .map(|p| ((p.x / d).floor() as i64, (p.t / d).floor() as i64))
                .collect();
            (1.0 / d, occupied.len() as f64)
        })
        .collect()
}

/// `(1 / delta, occupied intervals)` for each box size.
pub fn box_counts_1d(values: &[f64], box_sizes: &[f64]) -> Vec<(f64, f64)> {
    box_sizes
        .iter()
        .map(|&d| {
            let occupied: HashSet<i64> = values.iter().map(|v| (v / d).floor() as i64).collect();
            (1.0 / d, occupied.len() as f64)
        })
        .collect()
}

/// `(1 / delta, occupied boxes)` for boxes of the intrinsic metric: side
/// `delta^2` in `x` and `delta^3` in `t`, the balls of `|dx|^{1/2} + |dt|^{1/3}`.
pub fn intrinsic_box_counts(points: &[RescaledPoint], box_sizes: &[f64]) -> Vec<(f64, f64)> {
    box_sizes
        .iter()
        .map(|&d| {
            let (dx, dt) = (d * d, d * d * d);
            let occupied: HashSet<(i64, i64)> = points
                .iter()
                .map(|p| ((p.x / dx).floor() as i64, (p.t / dt).floor() as i64))
                .collect();
            (1.0 / d, occupied.len() as f64)
        })
        .collect()
}

/// Box-counting dimension: the slope of occupied-box counts against `1 / delta`.
pub fn box_count_dimension(points: &[RescaledPoint], box_sizes: &[f64]) -> Result<ExponentFit> {
    if points.is_empty() {
        return Err(invalid("box counting needs a nonempty point set"));
    }
    check_scales(box_sizes)?;
    fit_exponent(&box_counts(points, box_sizes))
}

/// One-dimensional box counting of a set of reals.
pub fn box_count_dimension_1d(values: &[f64], box_sizes: &[f64]) -> Result<ExponentFit> {
    if values.is_empty() {
        return Err(invalid("box counting needs a nonempty set"));
    }
    check_scales(box_sizes)?;
    fit_exponent(&box_counts_1d(values, box_sizes))
}

/// Dyadic box sizes `2^{-k}` for `k` in `range`.
pub fn dyadic(range: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    range.map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filled_square_is_two_dimensional() {
        let m = 1024;
        let pts: Vec<RescaledPoint> = (0..m * m)
            .map(|k| RescaledPoint::new((k % m) as f64 / m as f64, (k / m) as f64 / m as f64))
            .collect();
        let fit = box_count_dimension(&pts, &dyadic(2..=8)).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn segment_is_one_dimensional() {
        let pts: Vec<RescaledPoint> = (0..100_000)
            .map(|k| {
                let s = k as f64 / 100_000.0;
                RescaledPoint::new(0.3 * s, 0.8 * s)
            })
            .collect();
        let fit = box_count_dimension(&pts, &dyadic(3..=10)).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "{}", fit.slope);
        let line: Vec<f64> = (0..100_000).map(|k| k as f64 / 100_000.0).collect();
        let fit = box_count_dimension_1d(&line, &dyadic(2..=10)).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05);
    }

    #[test]
    fn cantor_set_dimension() {
        // Left endpoints of the level-12 middle-thirds construction.
        let mut pts = vec![0.0f64];
        let mut len = 1.0;
        for _ in 0..12 {
            len /= 3.0;
            pts = pts.iter().flat_map(|&p| [p, p + 2.0 * len]).collect();
        }
        let sizes: Vec<f64> = (2..=10).map(|k| 3f64.powi(-k) * 1.0001).collect();
        let fit = box_count_dimension_1d(&pts, &sizes).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!((fit.slope - d).abs() < 0.05, "{}", fit.slope);
    }

    #[test]
    fn intrinsic_dimensions_of_lines() {
        let m = 1 << 14;
        let horizontal: Vec<RescaledPoint> = (0..m).map(|k| RescaledPoint::new(k as f64 / m as f64, 0.5)).collect();
        let vertical: Vec<RescaledPoint> = (0..m).map(|k| RescaledPoint::new(0.5, k as f64 / m as f64)).collect();
        let sizes = dyadic(1..=4);
        let h = fit_exponent(&intrinsic_box_counts(&horizontal, &sizes)).unwrap();
        let v = fit_exponent(&intrinsic_box_counts(&vertical, &sizes)).unwrap();
        assert!((h.slope - 2.0).abs() < 0.05, "{}", h.slope);
        assert!((v.slope - 3.0).abs() < 0.05, "{}", v.slope);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(box_count_dimension(&[], &dyadic(1..=4)).is_err());
        assert!(box_count_dimension(&[RescaledPoint::ORIGIN], &dyadic(1..=2)).is_err());
        assert!(box_count_dimension_1d(&[0.0], &[0.1, 0.1, 0.1]).is_err());
    }
}

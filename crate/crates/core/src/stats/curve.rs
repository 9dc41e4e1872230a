//! Estimators on area-parametrized curves: scaling profiles, Poisson
//! variation sums, and the intrinsic Hölder modulus.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{CounterRng, Seed};
use crate::peano::PeanoCurve;
use crate::rescale::{intrinsic_distance, rescaled_curve_param, RescaledFrame, RescaledPoint};
use crate::stats::fit::{fit_exponent, ExponentFit};
use crate::stats::sample::compensated_sum;

/// A curve `v -> eta(v)` in rescaled coordinates.
pub trait CurveSampler {
    fn eval(&self, v: f64) -> Result<RescaledPoint>;
}

impl<F: Fn(f64) -> RescaledPoint> CurveSampler for F {
    fn eval(&self, v: f64) -> Result<RescaledPoint> {
        Ok(self(v))
    }
}

/// A lattice Peano curve seen through a rescaling frame.
#[derive(Debug, Clone, Copy)]
pub struct FramedCurve<'a> {
    pub frame: &'a RescaledFrame,
    pub curve: &'a PeanoCurve,
}

impl CurveSampler for FramedCurve<'_> {
    fn eval(&self, v: f64) -> Result<RescaledPoint> {
        rescaled_curve_param(self.frame, self.curve, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    /// Temporal coordinate `t` (the `u` component).
    U,
    /// Spatial coordinate `x` (the `h` component).
    H,
}

impl Coordinate {
    pub fn of(self, z: RescaledPoint) -> f64 {
        match self {
            Coordinate::U => z.t,
            Coordinate::H => z.x,
        }
    }
}

/// Replicate-averaged `|coordinate(eta(v)) - coordinate(eta(0))|` for each
/// volume in `v_grid`, fitted as a power law in `v`.
pub fn curve_scaling_profile<C: CurveSampler>(
    curves: &[C],
    v_grid: &[f64],
    coordinate: Coordinate,
) -> Result<ExponentFit> {
    if curves.is_empty() {
        return Err(invalid("scaling profile needs at least one curve"));
    }
    let per_curve = curves
        .iter()
        .map(|c| displacement_profile(c, v_grid, &[0.0], coordinate))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = v_grid
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, compensated_sum(per_curve.iter().map(|p| p[k])) / curves.len() as f64))
        .collect();
    fit_exponent(&pairs)
}

/// For each `v` in `v_grid`, the mean over `anchors` of
/// `|coordinate(eta(a + v)) - coordinate(eta(a))|`. Averaging over anchors
/// uses the translation invariance of the curve's increments.
pub fn displacement_profile<C: CurveSampler>(
    curve: &C,
    v_grid: &[f64],
    anchors: &[f64],
    coordinate: Coordinate,
) -> Result<Vec<f64>> {
    if anchors.is_empty() {
        return Err(invalid("displacement profile needs at least one anchor"));
    }
    let base = anchors.iter().map(|&a| curve.eval(a)).collect::<Result<Vec<_>>>()?;
    v_grid
        .iter()
        .map(|&v| {
            let devs = anchors
                .iter()
                .zip(&base)
                .map(|(&a, z0)| Ok((coordinate.of(curve.eval(a + v)?) - coordinate.of(*z0)).abs()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(compensated_sum(devs) / anchors.len() as f64)
        })
        .collect()
}

/// `count` evenly spaced points covering `[a, b]`, both ends included.
pub fn even_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect(),
    }
}

/// Mean of `In^alpha_v(eta, eps) / eps` over the anchors `v`: an estimate of
/// the per-volume increment constant at gap `eps`.
pub fn mean_increment_rate<C: CurveSampler>(curve: &C, anchors: &[f64], eps: f64, alpha: f64) -> Result<f64> {
    if anchors.is_empty() || !(eps > 0.0) {
        return Err(invalid("increment rate needs anchors and a positive gap"));
    }
    let incs = anchors
        .iter()
        .map(|&v| Ok(variation_increment(curve.eval(v)?, curve.eval(v + eps)?, alpha)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(incs) / anchors.len() as f64 / eps)
}

/// `|du|^{alpha/3} + |dh|^{alpha/2}`.
#[inline]
pub fn variation_increment(a: RescaledPoint, b: RescaledPoint, alpha: f64) -> f64 {
    (b.t - a.t).abs().powf(alpha / 3.0) + (b.x - a.x).abs().powf(alpha / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSample {
    pub interval: (f64, f64),
    pub rate: f64,
    pub alpha: f64,
    pub value: f64,
    pub point_count: usize,
}

/// Points of a rate-`rate` Poisson process on `[a, b]`, in increasing order.
pub fn poisson_points(a: f64, b: f64, rate: f64, sample_seed: u64) -> Vec<f64> {
    let rng = CounterRng::new(Seed::new(sample_seed, 0x5049_5353));
    let mut points = Vec::new();
    let mut v = a;
    let mut counter = 0u64;
    loop {
        let u = rng.uniform_at(counter);
        counter += 1;
        v += -(-u).ln_1p() / rate;
        if v > b {
            break;
        }
        points.push(v);
    }
    points
}

/// Sum of `alpha`-variation increments of the curve over consecutive points
/// of a Poisson process of rate `rate` on `interval`, independent of the curve.
pub fn variation_sum<C: CurveSampler>(
    curve: &C,
    interval: (f64, f64),
    rate: f64,
    alpha: f64,
    sample_seed: u64,
) -> Result<VariationSample> {
    let (a, b) = interval;
    if !(b > a) {
        return Err(invalid(format!("empty interval [{a}, {b}]")));
    }
    if !(rate > 0.0) {
        return Err(invalid(format!("rate {rate} must be positive")));
    }
    let points = poisson_points(a, b, rate, sample_seed);
    let evaluated = points.iter().map(|&v| curve.eval(v)).collect::<Result<Vec<_>>>()?;
    let value = compensated_sum(evaluated.windows(2).map(|w| variation_increment(w[0], w[1], alpha)));
    Ok(VariationSample {
        interval,
        rate,
        alpha,
        value,
        point_count: points.len(),
    })
}

/// For each `delta`, the largest intrinsic distance `d_in(eta(v), eta(v + delta))`
/// over `pairs` evenly spaced left endpoints `v` covering `window` (both ends
/// included), fitted as a power law in `delta`.
pub fn holder_modulus<C: CurveSampler>(
    curve: &C,
    window: (f64, f64),
    delta_grid: &[f64],
    pairs: usize,
) -> Result<ExponentFit> {
    if delta_grid.len() < 3 {
        return Err(invalid(format!("Hölder modulus needs at least 3 deltas, got {}", delta_grid.len())));
    }
    if pairs < 2 {
        return Err(invalid("Hölder modulus needs at least 2 pairs per delta"));
    }
    let (a, b) = window;
    let mut out = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        if !(delta > 0.0) || delta >= b - a {
            return Err(invalid(format!("delta {delta} does not fit the window [{a}, {b}]")));
        }
        let mut best = 0.0f64;
        for v in even_grid(a, b - delta, pairs) {
            best = best.max(intrinsic_distance(curve.eval(v)?, curve.eval(v + delta)?));
        }
        out.push((delta, best));
    }
    fit_exponent(&out)
}

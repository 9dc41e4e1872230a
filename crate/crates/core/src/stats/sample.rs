//! Sample summaries shared by the estimators: compensated sums, moments from
//! sorted data, and Kolmogorov-Smirnov statistics.

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m).powi(2))) / (values.len() as f64 - 1.0)
}

pub fn std_dev(values: &[f64]) -> f64 {
    variance(values).sqrt()
}

pub fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

/// One-sample KS distance of sorted data against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted_values: &[f64], cdf: F) -> f64 {
    ks_statistic_with_atoms(sorted_values, &cdf, &cdf)
}

/// One-sample KS distance against a CDF that may have atoms; `cdf_left`
/// gives the left limit `P(X < x)`. Tied data points are compared as a block.
pub fn ks_statistic_with_atoms<F, L>(sorted_values: &[f64], cdf: F, cdf_left: L) -> f64
where
    F: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
{
    let n = sorted_values.len() as f64;
    let mut d = 0.0f64;
    let mut k = 0;
    while k < sorted_values.len() {
        let x = sorted_values[k];
        let mut end = k;
        while end < sorted_values.len() && sorted_values[end] == x {
            end += 1;
        }
        d = d.max((end as f64 / n - cdf(x)).abs()).max((k as f64 / n - cdf_left(x)).abs());
        k = end;
    }
    d
}

/// Two-sample KS distance between sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn exp1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x).exp_m1()
    }
}

/// CDF of `X - Y` for independent exponentials of rate 1/2: Laplace with
/// density `e^{-|z|/2} / 4`.
pub fn laplace_half_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.5 * (z / 2.0).exp()
    } else {
        1.0 - 0.5 * (-z / 2.0).exp()
    }
}

/// CDF of `A+ - B+` for independent `A, B` with the [`laplace_half_cdf`] law:
/// an atom of mass 1/4 at zero and density `3 e^{-|z|/2} / 16` elsewhere.
pub fn clipped_laplace_difference_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.375 * (z / 2.0).exp()
    } else {
        1.0 - 0.375 * (-z / 2.0).exp()
    }
}

/// Left limit of [`clipped_laplace_difference_cdf`].
pub fn clipped_laplace_difference_cdf_left(z: f64) -> f64 {
    if z <= 0.0 {
        0.375 * (z / 2.0).exp()
    } else {
        1.0 - 0.375 * (-z / 2.0).exp()
    }
}

/// Empirical quantile of sorted data (nearest rank).
pub fn quantile(sorted_values: &[f64], q: f64) -> f64 {
    let k = ((sorted_values.len() as f64 - 1.0) * q).round() as usize;
    sorted_values[k.min(sorted_values.len() - 1)]
}

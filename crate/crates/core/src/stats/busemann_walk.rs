//! Busemann increments along an anti-diagonal and their walk statistics.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::WeightField;
use crate::lattice::Vertex;
use crate::lpp::ValueGrid;
use crate::stats::sample::{
    clipped_laplace_difference_cdf, clipped_laplace_difference_cdf_left, compensated_sum, ks_statistic,
    ks_statistic_with_atoms, laplace_half_cdf, sorted,
};

/// Fewest increments accepted by [`walk_stats`].
pub const MIN_INCREMENTS: usize = 100;

/// Which vertex weights a Busemann difference counts.
///
/// With the first vertex excluded, `B(p, q) = G(p) - G(q)` and the
/// anti-diagonal increments are `A+ - B+` for independent Laplace `A, B`
/// (variance 6, an atom of mass 1/4 at zero). Adding the starting weights,
/// `B(p, q) + X(p) - X(q)`, gives the classical stationary increments `X - Y`
/// with `X, Y ~ exp(1/2)` (variance 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    ExcludeFirst,
    IncludeFirst,
}

impl Convention {
    /// Exact increment variance in the stationary limit.
    pub fn variance(self) -> f64 {
        match self {
            Convention::ExcludeFirst => 6.0,
            Convention::IncludeFirst => 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub convention: Convention,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// KS distance to the exact increment law of the convention.
    pub ks: f64,
}

fn check_window(grid: &ValueGrid, level: u32, i_range: (u32, u32)) -> Result<()> {
    let (lo, hi) = i_range;
    let side = grid.side();
    if hi < lo || level < hi + 1 || hi + 1 >= side || level - lo >= side {
        return Err(invalid(format!(
            "increment window i in [{lo}, {hi}] does not fit level {level} of a box of side {side}"
        )));
    }
    Ok(())
}

/// Increments `B(v_{x+1}, v_x) = G(i + 1, j - 1) - G(i, j)` along level
/// `level`, for `i` in `i_range` (the left endpoint of each increment).
pub fn busemann_increments(grid: &ValueGrid, level: u32, i_range: (u32, u32)) -> Result<Vec<f64>> {
    check_window(grid, level, i_range)?;
    Ok((i_range.0..=i_range.1)
        .map(|i| grid.value(Vertex::new(i + 1, level - i - 1)) - grid.value(Vertex::new(i, level - i)))
        .collect())
}

/// The same increments with the starting weights counted.
pub fn inclusive_busemann_increments(
    field: &WeightField,
    grid: &ValueGrid,
    level: u32,
    i_range: (u32, u32),
) -> Result<Vec<f64>> {
    if field.side() != grid.side() {
        return Err(invalid("field and value grid have different sides"));
    }
    check_window(grid, level, i_range)?;
    Ok((i_range.0..=i_range.1)
        .map(|i| {
            let (u, v) = (Vertex::new(i + 1, level - i - 1), Vertex::new(i, level - i));
            (grid.value(u) + field.weight_unchecked(u)) - (grid.value(v) + field.weight_unchecked(v))
        })
        .collect())
}

/// Statistics of a pooled set of increments. Computed from the sorted
/// sample, so they do not depend on how the pool was assembled.
pub fn walk_stats(increments: Vec<f64>, convention: Convention) -> Result<WalkStats> {
    if increments.len() < MIN_INCREMENTS {
        return Err(invalid(format!(
            "{} increments, need at least {MIN_INCREMENTS}",
            increments.len()
        )));
    }
    let s = sorted(increments);
    let n = s.len() as f64;
    let mean = compensated_sum(s.iter().copied()) / n;
    let variance = compensated_sum(s.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
    let ks = match convention {
        Convention::IncludeFirst => ks_statistic(&s, laplace_half_cdf),
        Convention::ExcludeFirst => {
            ks_statistic_with_atoms(&s, clipped_laplace_difference_cdf, clipped_laplace_difference_cdf_left)
        }
    };
    Ok(WalkStats { convention, count: s.len(), mean, variance, ks })
}

/// Increments along one anti-diagonal window and their statistics.
pub fn busemann_increment_test(
    field: &WeightField,
    grid: &ValueGrid,
    level: u32,
    i_range: (u32, u32),
    convention: Convention,
) -> Result<WalkStats> {
    let inc = match convention {
        Convention::ExcludeFirst => busemann_increments(grid, level, i_range)?,
        Convention::IncludeFirst => inclusive_busemann_increments(field, grid, level, i_range)?,
    };
    walk_stats(inc, convention)
}

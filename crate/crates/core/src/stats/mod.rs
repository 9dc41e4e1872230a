//! Estimators for the scaling laws: exponent fits, curve profiles and
//! variations, Busemann walk tests, box counting, pullbacks and tails.

pub mod boxcount;
pub mod busemann_walk;
pub mod curve;
pub mod fit;
pub mod pullback;
pub mod sample;
pub mod tail;

pub use boxcount::{box_count_dimension, box_count_dimension_1d, box_counts, box_counts_1d, dyadic, intrinsic_box_counts};
pub use busemann_walk::{
    busemann_increment_test, busemann_increments, inclusive_busemann_increments, walk_stats, Convention, WalkStats,
};
pub use curve::{
    curve_scaling_profile, displacement_profile, even_grid, holder_modulus, mean_increment_rate, variation_increment, variation_sum, Coordinate, CurveSampler,
    FramedCurve, VariationSample,
};
pub use fit::{fit_exponent, ExponentFit};
pub use pullback::{pullback_indices, target_cells, PullbackTarget};
pub use tail::{vr_tail, TailCurve};

//! Preimages of planar sets under the curve: the rescaled volume values of
//! every cell that meets a target set.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::forest::SuccessorForest;
use crate::lattice::Vertex;
use crate::peano::PeanoCurve;
use crate::rescale::{index_to_volume, RescaledFrame};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PullbackTarget {
    /// The anti-diagonal `t = t0`, restricted to `|x| <= half_width`.
    Horizontal { t0: f64, half_width: f64 },
    /// The diagonal `x = x0`, restricted to `t` in `[t_lo, t_hi]`.
    Vertical { x0: f64, t_lo: f64, t_hi: f64 },
    /// The successor chain of the frame origin up to time `t_hi`.
    Geodesic { t_hi: f64 },
    /// Every cell with `|x| <= half_width` and `t` in `[t_lo, t_hi]`.
    Window { half_width: f64, t_lo: f64, t_hi: f64 },
}

/// Cells of the target set.
pub fn target_cells(frame: &RescaledFrame, forest: &SuccessorForest, target: PullbackTarget) -> Vec<Vertex> {
    let bx = forest.lattice();
    let level_of = |t: f64| frame.origin.level() as f64 + 2.0 * frame.n * t;
    match target {
        PullbackTarget::Horizontal { t0, half_width } => {
            let k = level_of(t0).round();
            if k < 0.0 || k > bx.max_level() as f64 {
                return Vec::new();
            }
            bx.level_vertices(k as u32)
                .filter(|&v| frame.to_rescaled(v).x.abs() <= half_width)
                .collect()
        }
        PullbackTarget::Vertical { x0, t_lo, t_hi } => {
            let d = (frame.origin.x2() as f64 + x0 * 2.0 * frame.x_unit()).round() as i64;
            let (k_lo, k_hi) = (level_of(t_lo).ceil().max(0.0) as i64, level_of(t_hi).floor() as i64);
            (k_lo..=k_hi.min(bx.max_level() as i64))
                .filter(|k| (k - d).rem_euclid(2) == 0)
                .filter_map(|k| {
                    let (i, j) = ((k + d) / 2, (k - d) / 2);
                    (i >= 0 && j >= 0).then(|| Vertex::new(i as u32, j as u32))
                })
                .filter(|&v| bx.contains(v))
                .collect()
        }
        PullbackTarget::Geodesic { t_hi } => {
            let k_hi = level_of(t_hi).floor().max(frame.origin.level() as f64) as u32;
            forest.chain_until(frame.origin, k_hi.min(bx.max_level())).0
        }
        PullbackTarget::Window { half_width, t_lo, t_hi } => {
            let (k_lo, k_hi) = (level_of(t_lo).ceil().max(0.0) as u32, level_of(t_hi).floor() as u32);
            (k_lo..=k_hi.min(bx.max_level()))
                .flat_map(|k| bx.level_vertices(k))
                .filter(|&v| frame.to_rescaled(v).x.abs() <= half_width)
                .collect()
        }
    }
}

/// Sorted rescaled volume values of the cells meeting `target`.
pub fn pullback_indices(
    frame: &RescaledFrame,
    curve: &PeanoCurve,
    forest: &SuccessorForest,
    target: PullbackTarget,
) -> Result<Vec<f64>> {
    let cells = target_cells(frame, forest, target);
    if cells.is_empty() {
        return Err(invalid(format!("{target:?} does not meet the box")));
    }
    let mut idx: Vec<i64> = cells.iter().map(|&v| curve.curve_index(v)).collect::<Result<_>>()?;
    idx.sort_unstable();
    Ok(idx.into_iter().map(|k| index_to_volume(frame, k)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Seed, WeightField};
    use crate::forest::successor_map;
    use crate::lpp::value_grid_default;
    use crate::peano::peano_order;

    fn setup(side: u32) -> (RescaledFrame, SuccessorForest, PeanoCurve) {
        let field = WeightField::on_demand(side, Seed::new(4, 4)).unwrap();
        let forest = successor_map(&field, &value_grid_default(&field)).unwrap();
        let frame = RescaledFrame::standard(side);
        let curve = peano_order(&forest).with_origin(frame.origin).unwrap();
        (frame, forest, curve)
    }

    #[test]
    fn targets_have_the_expected_shape() {
        let (frame, forest, _) = setup(64);
        let h = target_cells(&frame, &forest, PullbackTarget::Horizontal { t0: 0.5, half_width: 10.0 });
        assert!(h.iter().all(|v| v.level() == frame.origin.level() + 32));
        let v = target_cells(&frame, &forest, PullbackTarget::Vertical { x0: 0.0, t_lo: 0.0, t_hi: 1.0 });
        assert!(v.iter().all(|u| u.i == u.j));
        assert_eq!(v.len(), 33);
        let g = target_cells(&frame, &forest, PullbackTarget::Geodesic { t_hi: 1.0 });
        assert_eq!(g[0], frame.origin);
        assert_eq!(g.len(), 65);
    }

    #[test]
    fn whole_box_pullback_is_everything() {
        let (frame, forest, curve) = setup(32);
        let all = pullback_indices(
            &frame,
            &curve,
            &forest,
            PullbackTarget::Window { half_width: 1e9, t_lo: -1e9, t_hi: 1e9 },
        )
        .unwrap();
        assert_eq!(all.len(), 32 * 32);
        let step = frame.cell_area();
        assert!(all.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-12 * step.max(1.0)));
    }

    #[test]
    fn empty_intersection_is_error() {
        let (frame, forest, curve) = setup(32);
        let t = PullbackTarget::Horizontal { t0: 50.0, half_width: 1.0 };
        assert!(pullback_indices(&frame, &curve, &forest, t).is_err());
    }
}

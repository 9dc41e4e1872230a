//! SVG scenes of the geodesic tree (blue), the dual tree (red) and a curve
//! segment (green) in rescaled coordinates.
//!
//! Output is a pure function of its inputs: coordinates are printed with a
//! fixed number of decimals and edges are emitted in row-major order.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::forest::{DualForest, SuccessorForest};
use crate::peano::PeanoCurve;
use crate::rescale::{volume_to_index, RescaledFrame, RescaledPoint};

pub const TREE_COLOR: &str = "#1f4fd1";
pub const DUAL_COLOR: &str = "#d1261f";
pub const CURVE_COLOR: &str = "#16a34a";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub x_range: (f64, f64),
    pub t_range: (f64, f64),
    /// Curve volume range `[v1, v2]`; `None` or an empty range draws no curve.
    pub volume: Option<(f64, f64)>,
    /// Picture width in pixels; the height follows the window's aspect.
    pub width: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self { x_range: (-1.0, 1.0), t_range: (-0.5, 0.5), volume: Some((-0.1, 0.1)), width: 800 }
    }
}

impl RenderSpec {
    pub fn height(&self) -> u32 {
        let aspect = (self.t_range.1 - self.t_range.0) / (self.x_range.1 - self.x_range.0);
        ((self.width as f64 * aspect).round() as u32).max(1)
    }

    fn contains(&self, z: RescaledPoint) -> bool {
        (self.x_range.0..=self.x_range.1).contains(&z.x) && (self.t_range.0..=self.t_range.1).contains(&z.t)
    }

    fn pixel(&self, z: RescaledPoint) -> (f64, f64) {
        let (w, h) = (self.width as f64, self.height() as f64);
        let px = (z.x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * w;
        let py = h - (z.t - self.t_range.0) / (self.t_range.1 - self.t_range.0) * h;
        (px, py)
    }

    /// The window must be nondegenerate and its corners must map into the box.
    pub fn validate(&self, frame: &RescaledFrame) -> Result<()> {
        let (x0, x1) = self.x_range;
        let (t0, t1) = self.t_range;
        if !(x1 > x0) || !(t1 > t0) || self.width == 0 {
            return Err(invalid("render window must have positive width and height"));
        }
        for x in [x0, x1] {
            for t in [t0, t1] {
                frame
                    .to_lattice(RescaledPoint::new(x, t))
                    .map_err(|_| invalid(format!("render window corner ({x}, {t}) lies outside the box")))?;
            }
        }
        if let Some((v1, v2)) = self.volume {
            if v2 < v1 {
                return Err(invalid(format!("volume range [{v1}, {v2}] is reversed")));
            }
        }
        Ok(())
    }
}

/// Appends ` M a b L c d` for a segment whose ends both lie in the window.
fn push_segment(path: &mut String, spec: &RenderSpec, a: RescaledPoint, b: RescaledPoint) -> bool {
    if !(spec.contains(a) && spec.contains(b)) {
        return false;
    }
    let (p, q) = (spec.pixel(a), spec.pixel(b));
    let _ = write!(path, "M{:.2} {:.2}L{:.2} {:.2}", p.0, p.1, q.0, q.1);
    true
}

/// Counts of drawn elements, for reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderStats {
    pub tree_edges: usize,
    pub dual_edges: usize,
    pub curve_points: usize,
}

pub fn render_svg(
    frame: &RescaledFrame,
    forest: &SuccessorForest,
    dual: &DualForest,
    curve: &PeanoCurve,
    spec: &RenderSpec,
) -> Result<(String, RenderStats)> {
    spec.validate(frame)?;
    let bx = forest.lattice();
    let mut stats = RenderStats::default();

    let mut tree = String::new();
    for v in bx.iter() {
        if let Some(s) = forest.succ(v) {
            if push_segment(&mut tree, spec, frame.to_rescaled(v), frame.to_rescaled(s)) {
                stats.tree_edges += 1;
            }
        }
    }

    let mut dual_path = String::new();
    for b in 0..dual.faces() {
        for a in 0..dual.faces() {
            let (na, nb) = dual.next(a as i64, b as i64);
            let from = frame.to_rescaled_real(a as f64 + 0.5, b as f64 + 0.5);
            let to = frame.to_rescaled_real(na as f64 + 0.5, nb as f64 + 0.5);
            if push_segment(&mut dual_path, spec, from, to) {
                stats.dual_edges += 1;
            }
        }
    }

    let mut curve_path = String::new();
    if let Some((v1, v2)) = spec.volume {
        let (lo, hi) = curve.index_range();
        let k1 = volume_to_index(frame, v1).clamp(lo, hi);
        let k2 = volume_to_index(frame, v2).clamp(lo, hi);
        let mut pen_down = false;
        for k in k1..k2 {
            let z = frame.to_rescaled(curve.curve_lookup(k)?);
            if !spec.contains(z) {
                pen_down = false;
                continue;
            }
            let (px, py) = spec.pixel(z);
            let _ = write!(curve_path, "{}{:.2} {:.2}", if pen_down { "L" } else { "M" }, px, py);
            pen_down = true;
            stats.curve_points += 1;
        }
    }

    let (w, h) = (spec.width, spec.height());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (d, color, width) in [(&tree, TREE_COLOR, 0.6), (&dual_path, DUAL_COLOR, 0.6), (&curve_path, CURVE_COLOR, 1.2)] {
        if !d.is_empty() {
            let _ = writeln!(
                svg,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}" stroke-linecap="round"/>"#
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok((svg, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Seed, WeightField};
    use crate::forest::{dual_successor_map, successor_map};
    use crate::lattice::Vertex;
    use crate::lpp::value_grid_default;
    use crate::peano::peano_order;

    fn scene(seed: u64) -> (RescaledFrame, SuccessorForest, DualForest, PeanoCurve) {
        let field = WeightField::on_demand(64, Seed::new(seed, 0)).unwrap();
        let forest = successor_map(&field, &value_grid_default(&field)).unwrap();
        let dual = dual_successor_map(&forest);
        let frame = RescaledFrame::new(64, 16.0, Vertex::new(32, 32)).unwrap();
        let curve = peano_order(&forest).with_origin(frame.origin).unwrap();
        (frame, forest, dual, curve)
    }

    #[test]
    fn deterministic_and_colored() {
        let (frame, forest, dual, curve) = scene(3);
        let spec = RenderSpec::default();
        let (a, stats) = render_svg(&frame, &forest, &dual, &curve, &spec).unwrap();
        let (b, _) = render_svg(&frame, &forest, &dual, &curve, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(TREE_COLOR) && a.contains(DUAL_COLOR) && a.contains(CURVE_COLOR));
        assert!(stats.tree_edges > 0 && stats.dual_edges > 0 && stats.curve_points > 0);
        assert!(a.contains(r#"width="800" height="400""#));
    }

    #[test]
    fn empty_volume_draws_trees_only() {
        let (frame, forest, dual, curve) = scene(4);
        let spec = RenderSpec { volume: Some((0.0, 0.0)), ..RenderSpec::default() };
        let (svg, stats) = render_svg(&frame, &forest, &dual, &curve, &spec).unwrap();
        assert_eq!(stats.curve_points, 0);
        assert!(!svg.contains(CURVE_COLOR));
        assert!(svg.contains(TREE_COLOR));
    }

    #[test]
    fn window_outside_box_is_rejected() {
        let (frame, forest, dual, curve) = scene(5);
        let spec = RenderSpec { x_range: (-50.0, 1.0), ..RenderSpec::default() };
        assert!(render_svg(&frame, &forest, &dual, &curve, &spec).is_err());
        let flat = RenderSpec { t_range: (0.2, 0.2), ..RenderSpec::default() };
        assert!(render_svg(&frame, &forest, &dual, &curve, &flat).is_err());
    }
}

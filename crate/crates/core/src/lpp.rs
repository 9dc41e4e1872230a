//! Last-passage dynamic programming.
//!
//! Path weights follow the first-vertex-excluded convention: a path from `p`
//! to `q` collects the weights of every vertex except `p`. With it the value
//! to a root is additive along geodesics, `G(v) = X(s(v)) + G(s(v))`.

use crate::error::{Error, Result};
use crate::field::WeightField;
use crate::lattice::{LatticeBox, Step, Vertex};

/// Value-to-root `G(v) = T(v, root)` for every vertex of the box.
///
/// Vertices not coordinatewise below the root cannot reach it and hold
/// `f64::NEG_INFINITY`.
#[derive(Debug, Clone)]
pub struct ValueGrid {
    bx: LatticeBox,
    root: Vertex,
    values: Vec<f64>,
}

impl ValueGrid {
    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn lattice(&self) -> LatticeBox {
        self.bx
    }

    pub fn side(&self) -> u32 {
        self.bx.side
    }

    #[inline]
    pub fn value(&self, v: Vertex) -> f64 {
        self.values[self.bx.id(v)]
    }

    pub fn get(&self, v: Vertex) -> Result<f64> {
        if !self.bx.contains(v) {
            return Err(Error::OutOfBox { vertex: v, side: self.bx.side });
        }
        Ok(self.value(v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Up-right lattice path; consecutive vertices differ by one unit step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath(pub Vec<Vertex>);

impl LatticePath {
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn start(&self) -> Vertex {
        self.0[0]
    }

    pub fn end(&self) -> Vertex {
        *self.0.last().expect("paths are never empty")
    }

    /// Sum of weights along the path, excluding the first vertex.
    pub fn weight(&self, field: &WeightField) -> f64 {
        self.0.iter().skip(1).map(|&v| field.weight_unchecked(v)).sum()
    }

    pub fn is_up_right(&self) -> bool {
        self.0.windows(2).all(|w| {
            let (a, b) = (w[0], w[1]);
            (b.i == a.i + 1 && b.j == a.j) || (b.i == a.i && b.j == a.j + 1)
        })
    }

    /// Vertex of the path on level `k`, if any.
    pub fn at_level(&self, k: u32) -> Option<Vertex> {
        let first = self.start().level();
        if k < first {
            return None;
        }
        self.0.get((k - first) as usize).copied()
    }
}

fn check_in_box(field: &WeightField, v: Vertex) -> Result<()> {
    if field.lattice().contains(v) {
        Ok(())
    } else {
        Err(Error::OutOfBox { vertex: v, side: field.side() })
    }
}

fn check_order(field: &WeightField, p: Vertex, q: Vertex) -> Result<()> {
    check_in_box(field, p)?;
    check_in_box(field, q)?;
    if !p.below(q) {
        return Err(Error::Ordering { p, q });
    }
    Ok(())
}

/// Backward sweep over the rectangle `[lo, hi]`: local row-major values of
/// `T(v, hi)`. Each vertex's through-value `X(v) + G(v)` is computed once and
/// kept in a rolling row buffer.
fn backward_values(field: &WeightField, lo: Vertex, hi: Vertex) -> Vec<f64> {
    let w = (hi.i - lo.i + 1) as usize;
    let h = (hi.j - lo.j + 1) as usize;
    let mut g = vec![0.0; w * h];
    let mut through_above = vec![f64::NEG_INFINITY; w];
    for dj in (0..h).rev() {
        let mut through_right = f64::NEG_INFINITY;
        for di in (0..w).rev() {
            let val = if di == w - 1 && dj == h - 1 {
                0.0
            } else {
                through_right.max(through_above[di])
            };
            g[dj * w + di] = val;
            let v = Vertex::new(lo.i + di as u32, lo.j + dj as u32);
            let through = field.weight_unchecked(v) + val;
            through_above[di] = through;
            through_right = through;
        }
    }
    g
}

/// Last-passage values from every vertex to `root`.
pub fn value_grid(field: &WeightField, root: Vertex) -> Result<ValueGrid> {
    check_in_box(field, root)?;
    let bx = field.lattice();
    let local = backward_values(field, Vertex::new(0, 0), root);
    let w = root.i as usize + 1;
    let mut values = vec![f64::NEG_INFINITY; bx.cells()];
    for j in 0..=root.j {
        let src = &local[j as usize * w..(j as usize + 1) * w];
        let start = bx.id(Vertex::new(0, j));
        values[start..start + w].copy_from_slice(src);
    }
    Ok(ValueGrid { bx, root, values })
}

/// Value grid rooted at the top-right corner.
pub fn value_grid_default(field: &WeightField) -> ValueGrid {
    value_grid(field, field.lattice().top_right()).expect("corner is inside the box")
}

/// `T(p, q)`: maximum weight of an up-right path from `p` to `q`, excluding
/// `X(p)`. Forward sweep over anti-diagonals of the rectangle with two
/// rolling buffers.
pub fn passage_time(field: &WeightField, p: Vertex, q: Vertex) -> Result<f64> {
    check_order(field, p, q)?;
    let dx = (q.i - p.i) as usize;
    let dy = (q.j - p.j) as usize;
    let mut prev = vec![f64::NEG_INFINITY; dx + 1];
    let mut cur = vec![f64::NEG_INFINITY; dx + 1];
    prev[0] = 0.0;
    for d in 1..=dx + dy {
        let a_lo = d.saturating_sub(dy);
        let a_hi = d.min(dx);
        for a in a_lo..=a_hi {
            let left = if a > 0 { prev[a - 1] } else { f64::NEG_INFINITY };
            // (a, d - a) - e2 = (a, d - 1 - a) sits at index a of the previous diagonal.
            let below = if d - a > 0 { prev[a] } else { f64::NEG_INFINITY };
            let v = Vertex::new(p.i + a as u32, p.j + (d - a) as u32);
            cur[a] = left.max(below) + field.weight_unchecked(v);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[dx])
}

/// Geodesic from `p` to `q` by greedy argmax steps; float ties go up (e2).
pub fn geodesic_between(field: &WeightField, p: Vertex, q: Vertex) -> Result<LatticePath> {
    check_order(field, p, q)?;
    let g = backward_values(field, p, q);
    let w = (q.i - p.i + 1) as usize;
    let at = |v: Vertex| g[(v.j - p.j) as usize * w + (v.i - p.i) as usize];
    let mut path = vec![p];
    let mut v = p;
    while v != q {
        let step = if v.j == q.j {
            Step::Right
        } else if v.i == q.i {
            Step::Up
        } else {
            let right = v.step(Step::Right);
            let up = v.step(Step::Up);
            let hr = field.weight_unchecked(right) + at(right);
            let hu = field.weight_unchecked(up) + at(up);
            if hu >= hr {
                Step::Up
            } else {
                Step::Right
            }
        };
        v = v.step(step);
        path.push(v);
    }
    Ok(LatticePath(path))
}

/// Largest per-axis displacement accepted by [`brute_force_passage`].
pub const BRUTE_FORCE_LIMIT: u32 = 8;

/// Exhaustive enumeration of every up-right path from `p` to `q`.
pub fn brute_force_passage(field: &WeightField, p: Vertex, q: Vertex) -> Result<(f64, LatticePath)> {
    check_order(field, p, q)?;
    let disp = (q.i - p.i).max(q.j - p.j);
    if disp > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(disp));
    }

    fn walk(
        field: &WeightField,
        v: Vertex,
        q: Vertex,
        acc: f64,
        stack: &mut Vec<Vertex>,
        best: &mut (f64, Vec<Vertex>),
    ) {
        if v == q {
            if acc > best.0 {
                *best = (acc, stack.clone());
            }
            return;
        }
        for s in [Step::Up, Step::Right] {
            let u = v.step(s);
            if u.below(q) {
                stack.push(u);
                walk(field, u, q, acc + field.weight_unchecked(u), stack, best);
                stack.pop();
            }
        }
    }

    let mut best = (f64::NEG_INFINITY, Vec::new());
    let mut stack = vec![p];
    walk(field, p, q, 0.0, &mut stack, &mut best);
    Ok((best.0, LatticePath(best.1)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The 2x2 instance: X(1,0)=1, X(0,1)=2, X(1,1)=3.
    pub(crate) fn two_by_two() -> WeightField {
        // row-major: (0,0), (1,0), (0,1), (1,1)
        WeightField::from_weights(2, vec![0.5, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn two_by_two_values() {
        let f = two_by_two();
        let g = value_grid(&f, Vertex::new(1, 1)).unwrap();
        assert_eq!(g.value(Vertex::new(1, 1)), 0.0);
        assert_eq!(g.value(Vertex::new(1, 0)), 3.0);
        assert_eq!(g.value(Vertex::new(0, 1)), 3.0);
        assert_eq!(g.value(Vertex::new(0, 0)), 5.0);
    }

    #[test]
    fn two_by_two_passage_and_geodesic() {
        let f = two_by_two();
        let (p, q) = (Vertex::new(0, 0), Vertex::new(1, 1));
        assert_eq!(passage_time(&f, p, q).unwrap(), 5.0);
        assert_eq!(passage_time(&f, p, p).unwrap(), 0.0);
        let path = geodesic_between(&f, p, q).unwrap();
        assert_eq!(path.0, vec![p, Vertex::new(0, 1), q]);
        assert_eq!(geodesic_between(&f, q, q).unwrap().0, vec![q]);
        let (w, bp) = brute_force_passage(&f, p, q).unwrap();
        assert_eq!(w, 5.0);
        assert_eq!(bp.0[1], Vertex::new(0, 1));
        assert_eq!(brute_force_passage(&f, p, p).unwrap(), (0.0, LatticePath(vec![p])));
    }

    #[test]
    fn errors() {
        let f = two_by_two();
        let (p, q) = (Vertex::new(1, 0), Vertex::new(0, 1));
        assert!(matches!(passage_time(&f, p, q), Err(Error::Ordering { .. })));
        assert!(matches!(geodesic_between(&f, p, q), Err(Error::Ordering { .. })));
        assert!(value_grid(&f, Vertex::new(2, 0)).is_err());
        let big = WeightField::on_demand(12, crate::field::Seed::new(1, 0)).unwrap();
        assert!(matches!(
            brute_force_passage(&big, Vertex::new(0, 0), Vertex::new(9, 2)),
            Err(Error::TooLarge(9))
        ));
    }

    #[test]
    fn interior_root_leaves_unreachable_vertices_at_minus_infinity() {
        let f = WeightField::on_demand(6, crate::field::Seed::new(3, 0)).unwrap();
        let root = Vertex::new(3, 2);
        let g = value_grid(&f, root).unwrap();
        assert_eq!(g.value(Vertex::new(4, 0)), f64::NEG_INFINITY);
        assert_eq!(g.value(Vertex::new(0, 3)), f64::NEG_INFINITY);
        for v in f.lattice().iter().filter(|v| v.below(root)) {
            assert_eq!(g.value(v), passage_time(&f, v, root).unwrap());
        }
    }

    #[test]
    fn degenerate_rectangles() {
        let f = WeightField::on_demand(6, crate::field::Seed::new(9, 0)).unwrap();
        let p = Vertex::new(1, 2);
        let row = Vertex::new(5, 2);
        let col = Vertex::new(1, 5);
        let row_sum: f64 = (2..=5).map(|i| f.weight(Vertex::new(i, 2)).unwrap()).sum();
        let col_sum: f64 = (3..=5).map(|j| f.weight(Vertex::new(1, j)).unwrap()).sum();
        assert!((passage_time(&f, p, row).unwrap() - row_sum).abs() < 1e-12);
        assert!((passage_time(&f, p, col).unwrap() - col_sum).abs() < 1e-12);
    }
}

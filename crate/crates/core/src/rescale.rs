//! KPZ rescaling between lattice coordinates and `(x, t)` coordinates.
//!
//! With scale `n` and an origin vertex, a lattice point at displacement
//! `(di, dj)` maps to `t = (di + dj) / (2n)` and
//! `x = (di - dj) 2^{-5/3} n^{-2/3}`, i.e. the lattice point is
//! `origin + t n (1, 1) + 2^{2/3} x n^{2/3} (1, -1)`. One lattice cell has
//! rescaled area `2^{-5/3} n^{-5/3}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::WeightField;
use crate::forest::{coalescence_point, SuccessorForest};
use crate::lattice::{LatticeBox, Vertex};
use crate::lpp::{passage_time, ValueGrid};
use crate::peano::PeanoCurve;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledPoint {
    pub x: f64,
    pub t: f64,
}

impl RescaledPoint {
    pub const ORIGIN: RescaledPoint = RescaledPoint { x: 0.0, t: 0.0 };

    pub fn new(x: f64, t: f64) -> Self {
        Self { x, t }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledFrame {
    pub n: f64,
    pub origin: Vertex,
    pub side: u32,
}

impl RescaledFrame {
    pub fn new(side: u32, n: f64, origin: Vertex) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Invalid(format!("scale {n} must be positive")));
        }
        if !LatticeBox::new(side).contains(origin) {
            return Err(Error::OutOfBox { vertex: origin, side });
        }
        Ok(Self { n, origin, side })
    }

    /// Default frame for a box of side `N`: `n = N / 2`, origin at `(N/4, N/4)`.
    pub fn standard(side: u32) -> Self {
        Self {
            n: side as f64 / 2.0,
            origin: Vertex::new(side / 4, side / 4),
            side,
        }
    }

    /// Spatial lattice units per unit of `x`: `2^{2/3} n^{2/3}` along (1, -1).
    #[inline]
    pub fn x_unit(&self) -> f64 {
        2f64.powf(2.0 / 3.0) * self.n.powf(2.0 / 3.0)
    }

    /// Rescaled area of one lattice cell, `2^{-5/3} n^{-5/3}`.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        2f64.powf(-5.0 / 3.0) * self.n.powf(-5.0 / 3.0)
    }

    /// Passage-time fluctuation scale `2^{4/3} n^{1/3}`.
    #[inline]
    pub fn fluctuation_unit(&self) -> f64 {
        2f64.powf(4.0 / 3.0) * self.n.powf(1.0 / 3.0)
    }

    pub fn to_rescaled(&self, p: Vertex) -> RescaledPoint {
        let di = p.i as f64 - self.origin.i as f64;
        let dj = p.j as f64 - self.origin.j as f64;
        RescaledPoint {
            x: (di - dj) * 2f64.powf(-5.0 / 3.0) * self.n.powf(-2.0 / 3.0),
            t: (di + dj) / (2.0 * self.n),
        }
    }

    /// Rescaled position of a real lattice point (e.g. a dual vertex).
    pub fn to_rescaled_real(&self, i: f64, j: f64) -> RescaledPoint {
        let di = i - self.origin.i as f64;
        let dj = j - self.origin.j as f64;
        RescaledPoint {
            x: (di - dj) * 2f64.powf(-5.0 / 3.0) * self.n.powf(-2.0 / 3.0),
            t: (di + dj) / (2.0 * self.n),
        }
    }

    /// Lattice vertex whose tile `p + {s(1,1) + y(1,-1): s in (-1/4, 1/4], y in (-1/2, 1/2]}`
    /// contains the mapped point.
    pub fn to_lattice(&self, z: RescaledPoint) -> Result<Vertex> {
        let s = z.t * self.n;
        let y = z.x * self.x_unit();
        let qi = self.origin.i as f64 + s + y;
        let qj = self.origin.j as f64 + s - y;
        let v = round_to_tile(qi, qj).ok_or(Error::RescaledOutOfBox { x: z.x, t: z.t })?;
        if !LatticeBox::new(self.side).contains(v) {
            return Err(Error::RescaledOutOfBox { x: z.x, t: z.t });
        }
        Ok(v)
    }
}

/// The tiling map: `p` with `(qi + qj) - (pi + pj)` in `(-1/2, 1/2]` and
/// `(qi - qj) - (pi - pj)` in `(-1, 1]`. `None` for negative coordinates.
pub fn round_to_tile(qi: f64, qj: f64) -> Option<Vertex> {
    let sum = qi + qj;
    let diff = qi - qj;
    let m = (sum - 0.5).ceil() as i64;
    // d has the parity of m and lies in [diff - 1, diff + 1).
    let mut d = (diff - 1.0).ceil() as i64;
    if (d - m).rem_euclid(2) != 0 {
        d += 1;
    }
    let pi = (m + d) / 2;
    let pj = (m - d) / 2;
    if pi < 0 || pj < 0 || pi > u32::MAX as i64 || pj > u32::MAX as i64 {
        return None;
    }
    Some(Vertex::new(pi as u32, pj as u32))
}

/// `2^{-4/3} n^{-1/3} (T(r(z1), r(z2)) - 4 (t2 - t1) n)`.
pub fn rescaled_passage(
    frame: &RescaledFrame,
    field: &WeightField,
    z1: RescaledPoint,
    z2: RescaledPoint,
) -> Result<f64> {
    if z2.t < z1.t {
        return Err(Error::Invalid(format!("t2 = {} precedes t1 = {}", z2.t, z1.t)));
    }
    let p = frame.to_lattice(z1)?;
    let q = frame.to_lattice(z2)?;
    let t = passage_time(field, p, q)?;
    Ok((t - 4.0 * (z2.t - z1.t) * frame.n) / frame.fluctuation_unit())
}

/// `2^{-4/3} n^{-1/3} (B(r(z1), r(z2)) + 4 n (t1 - t2))`, the difference of
/// rescaled passage values from `z1` and `z2` to their coalescence point.
pub fn rescaled_busemann(
    frame: &RescaledFrame,
    grid: &ValueGrid,
    z1: RescaledPoint,
    z2: RescaledPoint,
) -> Result<f64> {
    let p = frame.to_lattice(z1)?;
    let q = frame.to_lattice(z2)?;
    let b = grid.get(p)? - grid.get(q)?;
    Ok((b + 4.0 * frame.n * (z1.t - z2.t)) / frame.fluctuation_unit())
}

/// Same quantity as [`rescaled_busemann`], computed as
/// `L(z1; z) - L(z2; z)` through explicit passage times to the coalescence
/// point `z` of the two lattice vertices.
pub fn rescaled_busemann_via_coalescence(
    frame: &RescaledFrame,
    field: &WeightField,
    forest: &SuccessorForest,
    z1: RescaledPoint,
    z2: RescaledPoint,
) -> Result<f64> {
    let p = frame.to_lattice(z1)?;
    let q = frame.to_lattice(z2)?;
    let z = frame.to_rescaled(coalescence_point(forest, p, q)?);
    Ok(rescaled_passage(frame, field, z1, z)? - rescaled_passage(frame, field, z2, z)?)
}

/// `|x1 - x2|^{1/2} + |t1 - t2|^{1/3}`.
pub fn intrinsic_distance(z1: RescaledPoint, z2: RescaledPoint) -> f64 {
    (z1.x - z2.x).abs().sqrt() + (z1.t - z2.t).abs().cbrt()
}

/// Curve position at rescaled volume `v`: index `round(v 2^{5/3} n^{5/3})`
/// relative to the curve origin.
pub fn rescaled_curve_param(frame: &RescaledFrame, curve: &PeanoCurve, v: f64) -> Result<RescaledPoint> {
    let index = volume_to_index(frame, v);
    let (lo, hi) = curve.index_range();
    if !v.is_finite() || index < lo || index > hi {
        return Err(Error::Invalid(format!("volume {v} outside curve range")));
    }
    Ok(frame.to_rescaled(curve.curve_lookup(index)?))
}

#[inline]
pub fn volume_to_index(frame: &RescaledFrame, v: f64) -> i64 {
    (v / frame.cell_area()).round() as i64
}

#[inline]
pub fn index_to_volume(frame: &RescaledFrame, index: i64) -> f64 {
    index as f64 * frame.cell_area()
}

//! Lattice primitives shared by every module: vertices, unit steps, levels.
//!
//! Vertex `(i, j)` has horizontal coordinate `i` (direction e1) and vertical
//! coordinate `j` (direction e2). The integer level `i + j` is the discrete
//! time coordinate; `i - j` is twice the discrete spatial coordinate.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub i: u32,
    pub j: u32,
}

impl Vertex {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    #[inline]
    pub fn level(self) -> u32 {
        self.i + self.j
    }

    /// Twice the spatial coordinate, `i - j`.
    #[inline]
    pub fn x2(self) -> i64 {
        self.i as i64 - self.j as i64
    }

    #[inline]
    pub fn step(self, s: Step) -> Vertex {
        match s {
            Step::Right => Vertex::new(self.i + 1, self.j),
            Step::Up => Vertex::new(self.i, self.j + 1),
        }
    }

    /// Coordinatewise `self <= other`.
    #[inline]
    pub fn below(self, other: Vertex) -> bool {
        self.i <= other.i && self.j <= other.j
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// An up-right unit step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    /// e1
    Right,
    /// e2
    Up,
}

/// Square box of `side x side` vertices, `0 <= i, j < side`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub side: u32,
}

impl LatticeBox {
    pub fn new(side: u32) -> Self {
        Self { side }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        v.i < self.side && v.j < self.side
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.side as usize * self.side as usize
    }

    /// Row-major vertex id.
    #[inline]
    pub fn id(&self, v: Vertex) -> usize {
        v.j as usize * self.side as usize + v.i as usize
    }

    #[inline]
    pub fn vertex(&self, id: usize) -> Vertex {
        let s = self.side as usize;
        Vertex::new((id % s) as u32, (id / s) as u32)
    }

    pub fn top_right(&self) -> Vertex {
        Vertex::new(self.side - 1, self.side - 1)
    }

    pub fn max_level(&self) -> u32 {
        2 * (self.side - 1)
    }

    /// Vertices on level `k`, ordered by increasing `i` (left to right).
    pub fn level_vertices(&self, k: u32) -> impl Iterator<Item = Vertex> {
        let side = self.side;
        let lo = k.saturating_sub(side - 1);
        let hi = k.min(side - 1);
        (lo..=hi).map(move |i| Vertex::new(i, k - i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> {
        let side = self.side;
        (0..side).flat_map(move |j| (0..side).map(move |i| Vertex::new(i, j)))
    }
}

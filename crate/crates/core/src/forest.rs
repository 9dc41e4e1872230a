//! The geodesic tree toward the root, its planar dual, coalescence queries,
//! Busemann differences and the right-accumulated volume.
//!
//! The root is always the top-right corner of the box. Each non-root vertex
//! stores a single successor bit (`1` = up, `0` = right). Each face, indexed by
//! its lower-left vertex `(a, b)` with `a, b < side - 1`, stores a dual bit
//! (`1` = down, `0` = left); the dual step crosses the edge out of `(a, b)`
//! that the tree does not use.

use crate::error::{Error, Result};
use crate::field::WeightField;
use crate::lattice::{LatticeBox, Step, Vertex};
use crate::lpp::{LatticePath, ValueGrid};

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    fn get(&self, k: usize) -> bool {
        (self.words[k >> 6] >> (k & 63)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, k: usize, on: bool) {
        let mask = 1u64 << (k & 63);
        if on {
            self.words[k >> 6] |= mask;
        } else {
            self.words[k >> 6] &= !mask;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessorForest {
    bx: LatticeBox,
    up: BitSet,
}

impl SuccessorForest {
    /// Forest from explicit successor steps (row-major, root entry ignored).
    /// Boundary forcing is applied; the result is always a spanning tree.
    pub fn from_steps(side: u32, steps: &[Step]) -> Result<Self> {
        let bx = LatticeBox::new(side);
        if side < 2 || steps.len() != bx.cells() {
            return Err(Error::Invalid(format!("{} steps for box side {side}", steps.len())));
        }
        let mut up = BitSet::new(bx.cells());
        for v in bx.iter() {
            let forced = forced_step(bx, v);
            let s = forced.unwrap_or(steps[bx.id(v)]);
            up.set(bx.id(v), s == Step::Up);
        }
        up.set(bx.id(bx.top_right()), false);
        Ok(Self { bx, up })
    }

    pub fn lattice(&self) -> LatticeBox {
        self.bx
    }

    pub fn side(&self) -> u32 {
        self.bx.side
    }

    pub fn root(&self) -> Vertex {
        self.bx.top_right()
    }

    /// Successor step of a non-root vertex.
    #[inline]
    pub fn step(&self, v: Vertex) -> Option<Step> {
        if v == self.root() {
            None
        } else if self.up.get(self.bx.id(v)) {
            Some(Step::Up)
        } else {
            Some(Step::Right)
        }
    }

    #[inline]
    pub fn succ(&self, v: Vertex) -> Option<Vertex> {
        self.step(v).map(|s| v.step(s))
    }

    /// Child reached by walking back along e1 (arrives horizontally).
    #[inline]
    pub fn left_child(&self, v: Vertex) -> Option<Vertex> {
        if v.i == 0 {
            return None;
        }
        let c = Vertex::new(v.i - 1, v.j);
        (self.step(c) == Some(Step::Right)).then_some(c)
    }

    /// Child reached by walking back along e2 (arrives vertically).
    #[inline]
    pub fn right_child(&self, v: Vertex) -> Option<Vertex> {
        if v.j == 0 {
            return None;
        }
        let c = Vertex::new(v.i, v.j - 1);
        (self.step(c) == Some(Step::Up)).then_some(c)
    }

    /// Successor chain from `v` to the root, inclusive.
    pub fn chain(&self, v: Vertex) -> LatticePath {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(next) = self.succ(cur) {
            path.push(next);
            cur = next;
        }
        LatticePath(path)
    }

    /// Successor chain from `v`, stopped after level `max_level`.
    pub fn chain_until(&self, v: Vertex, max_level: u32) -> LatticePath {
        let mut path = vec![v];
        let mut cur = v;
        while cur.level() < max_level {
            match self.succ(cur) {
                Some(next) => {
                    path.push(next);
                    cur = next;
                }
                None => break,
            }
        }
        LatticePath(path)
    }
}

fn forced_step(bx: LatticeBox, v: Vertex) -> Option<Step> {
    if v.j == bx.side - 1 {
        Some(Step::Right)
    } else if v.i == bx.side - 1 {
        Some(Step::Up)
    } else {
        None
    }
}

/// Argmax successor of every vertex; float ties go up (e2).
pub fn successor_map(field: &WeightField, grid: &ValueGrid) -> Result<SuccessorForest> {
    let bx = field.lattice();
    if grid.lattice() != bx {
        return Err(Error::Invalid(format!(
            "grid side {} does not match field side {}",
            grid.side(),
            bx.side
        )));
    }
    if grid.root() != bx.top_right() {
        return Err(Error::Invalid(format!(
            "successor forests are rooted at the top-right corner, grid root is {}",
            grid.root()
        )));
    }
    let side = bx.side as usize;
    let mut up = BitSet::new(bx.cells());
    // Through-values X(u) + G(u) of the row above, computed once per vertex.
    let mut through_above = vec![0.0; side];
    let mut through_row = vec![0.0; side];
    for j in (0..bx.side).rev() {
        for i in 0..bx.side {
            let v = Vertex::new(i, j);
            through_row[i as usize] = field.weight_unchecked(v) + grid.value(v);
        }
        for i in 0..bx.side {
            let v = Vertex::new(i, j);
            let is_up = match forced_step(bx, v) {
                Some(s) => s == Step::Up,
                None => through_above[i as usize] >= through_row[i as usize + 1],
            };
            up.set(bx.id(v), is_up && v != bx.top_right());
        }
        std::mem::swap(&mut through_above, &mut through_row);
    }
    Ok(SuccessorForest { bx, up })
}

/// Dual step of a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualStep {
    /// -e1
    Left,
    /// -e2
    Down,
}

/// Planar dual of the geodesic tree on the `(side - 1)^2` faces of the box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualForest {
    faces: u32,
    down: BitSet,
}

impl DualForest {
    /// Faces per axis (`side - 1`).
    pub fn faces(&self) -> u32 {
        self.faces
    }

    /// Dual step of face `(a + 1/2, b + 1/2)`.
    #[inline]
    pub fn step(&self, a: u32, b: u32) -> DualStep {
        if self.down.get(b as usize * self.faces as usize + a as usize) {
            DualStep::Down
        } else {
            DualStep::Left
        }
    }

    /// Next dual vertex from face `(a, b)`; coordinates may leave the box
    /// (reach `-1`), after which the path has exited.
    #[inline]
    pub fn next(&self, a: i64, b: i64) -> (i64, i64) {
        if a < 0 {
            (a, b - 1)
        } else if b < 0 {
            (a - 1, b)
        } else {
            match self.step(a as u32, b as u32) {
                DualStep::Down => (a, b - 1),
                DualStep::Left => (a - 1, b),
            }
        }
    }
}

/// Dual successors: down exactly where the primal successor is up.
pub fn dual_successor_map(forest: &SuccessorForest) -> DualForest {
    let faces = forest.side() - 1;
    let mut down = BitSet::new(faces as usize * faces as usize);
    for b in 0..faces {
        for a in 0..faces {
            let is_down = forest.step(Vertex::new(a, b)) == Some(Step::Up);
            down.set(b as usize * faces as usize + a as usize, is_down);
        }
    }
    DualForest { faces, down }
}

/// First common vertex of the successor chains of `p` and `q`.
pub fn coalescence_point(forest: &SuccessorForest, p: Vertex, q: Vertex) -> Result<Vertex> {
    let bx = forest.lattice();
    for v in [p, q] {
        if !bx.contains(v) {
            return Err(Error::OutOfBox { vertex: v, side: bx.side });
        }
    }
    let (mut a, mut b) = (p, q);
    while a != b {
        if a.level() <= b.level() {
            a = forest.succ(a).expect("chains meet at the root");
        } else {
            b = forest.succ(b).expect("chains meet at the root");
        }
    }
    Ok(a)
}

/// Busemann difference `G(p) - G(q)`; equals `T(p, z) - T(q, z)` at the
/// coalescence point `z`.
pub fn busemann(grid: &ValueGrid, p: Vertex, q: Vertex) -> Result<f64> {
    Ok(grid.get(p)? - grid.get(q)?)
}

/// Level at which each vertex's successor chain first meets the chain of a
/// fixed base vertex.
#[derive(Debug, Clone)]
pub struct CoalescenceGrid {
    bx: LatticeBox,
    base: Vertex,
    levels: Vec<u32>,
}

impl CoalescenceGrid {
    pub fn base(&self) -> Vertex {
        self.base
    }

    #[inline]
    pub fn level(&self, v: Vertex) -> u32 {
        self.levels[self.bx.id(v)]
    }
}

pub fn coalescence_levels(forest: &SuccessorForest, base: Vertex) -> Result<CoalescenceGrid> {
    let bx = forest.lattice();
    if !bx.contains(base) {
        return Err(Error::OutOfBox { vertex: base, side: bx.side });
    }
    let mut on_chain = vec![false; bx.cells()];
    for v in forest.chain(base).vertices() {
        on_chain[bx.id(*v)] = true;
    }
    let mut levels = vec![0u32; bx.cells()];
    // Reverse row-major order visits every successor before its predecessor.
    for id in (0..bx.cells()).rev() {
        let v = bx.vertex(id);
        levels[id] = if on_chain[id] {
            v.level()
        } else {
            let s = forest.succ(v).expect("only the root lacks a successor, and it is on every chain");
            levels[bx.id(s)]
        };
    }
    Ok(CoalescenceGrid { bx, base, levels })
}

fn check_horizon(forest: &SuccessorForest, base: Vertex, horizon_level: u32) -> Result<()> {
    let bx = forest.lattice();
    if !bx.contains(base) {
        return Err(Error::OutOfBox { vertex: base, side: bx.side });
    }
    if horizon_level > bx.max_level() || horizon_level < base.level() {
        return Err(Error::Invalid(format!(
            "horizon level {horizon_level} outside [{}, {}]",
            base.level(),
            bx.max_level()
        )));
    }
    Ok(())
}

/// Number of vertices `q` with `level(base) <= level(q) <= horizon_level`,
/// on or to the right of the base chain, whose chain has joined the base
/// chain by `horizon_level`.
pub fn volume_right(
    forest: &SuccessorForest,
    cl: &CoalescenceGrid,
    base: Vertex,
    horizon_level: u32,
) -> Result<u64> {
    check_horizon(forest, base, horizon_level)?;
    if cl.base() != base {
        return Err(Error::Invalid("coalescence grid built for another base".into()));
    }
    let bx = forest.lattice();
    let chain = forest.chain_until(base, horizon_level);
    let mut count = 0u64;
    for k in base.level()..=horizon_level {
        let g = chain.at_level(k).expect("chain reaches the horizon").x2();
        count += bx
            .level_vertices(k)
            .filter(|q| q.x2() >= g && cl.level(*q) <= horizon_level)
            .count() as u64;
    }
    Ok(count)
}

/// Same count as [`volume_right`] by walking the subtree hanging below the
/// base chain's horizon vertex. Cost is proportional to the volume instead of
/// the box.
pub fn volume_right_subtree(forest: &SuccessorForest, base: Vertex, horizon_level: u32) -> Result<u64> {
    check_horizon(forest, base, horizon_level)?;
    let chain = forest.chain_until(base, horizon_level);
    let l0 = base.level();
    let top = chain.end();
    let gamma = |k: u32| chain.at_level(k).expect("level within chain").x2();
    let mut count = 0u64;
    let mut stack = vec![top];
    while let Some(v) = stack.pop() {
        count += 1;
        for c in [forest.left_child(v), forest.right_child(v)].into_iter().flatten() {
            // A vertex strictly left of the chain roots a subtree that stays left of it.
            if c.level() >= l0 && c.x2() >= gamma(c.level()) {
                stack.push(c);
            }
        }
    }
    Ok(count)
}

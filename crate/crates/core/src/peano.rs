//! The discrete Peano curve: in-order contour of the geodesic tree.
//!
//! At every vertex the subtree hanging off the left child (arriving along
//! e1) is visited first, then the vertex, then the subtree of the right child
//! (arriving along e2). A prefix of this order is exactly the set of vertices
//! whose rays lie to the left of the ray of the prefix's last vertex, so the
//! index is an area parametrization: index differences count cells.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::forest::{DualForest, SuccessorForest};
use crate::lattice::{LatticeBox, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeanoCurve {
    bx: LatticeBox,
    order: Vec<u32>,
    inverse: Vec<u32>,
    origin_index: i64,
}

/// Iterative in-order traversal from the root.
pub fn peano_order(forest: &SuccessorForest) -> PeanoCurve {
    let bx = forest.lattice();
    let mut order = Vec::with_capacity(bx.cells());
    let mut stack: Vec<Vertex> = Vec::new();
    let mut cur = Some(forest.root());
    loop {
        while let Some(v) = cur {
            stack.push(v);
            cur = forest.left_child(v);
        }
        let Some(v) = stack.pop() else { break };
        order.push(bx.id(v) as u32);
        cur = forest.right_child(v);
    }
    debug_assert_eq!(order.len(), bx.cells());
    let mut inverse = vec![0u32; bx.cells()];
    for (k, &id) in order.iter().enumerate() {
        inverse[id as usize] = k as u32;
    }
    PeanoCurve { bx, order, inverse, origin_index: 0 }
}

impl PeanoCurve {
    pub fn lattice(&self) -> LatticeBox {
        self.bx
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    pub fn origin(&self) -> Vertex {
        self.bx.vertex(self.order[self.origin_index as usize] as usize)
    }

    /// Shift indices so that `origin` gets signed index 0.
    pub fn with_origin(mut self, origin: Vertex) -> Result<Self> {
        if !self.bx.contains(origin) {
            return Err(Error::OutOfBox { vertex: origin, side: self.bx.side });
        }
        self.origin_index = self.inverse[self.bx.id(origin)] as i64;
        Ok(self)
    }

    /// Smallest and largest signed index.
    pub fn index_range(&self) -> (i64, i64) {
        (-self.origin_index, self.len() as i64 - 1 - self.origin_index)
    }

    /// Vertex at absolute position `k` (0-based, no origin shift).
    #[inline]
    pub fn at_position(&self, k: usize) -> Vertex {
        self.bx.vertex(self.order[k] as usize)
    }

    #[inline]
    pub fn position_of(&self, v: Vertex) -> usize {
        self.inverse[self.bx.id(v)] as usize
    }

    pub fn curve_lookup(&self, index: i64) -> Result<Vertex> {
        let (lo, hi) = self.index_range();
        if index < lo || index > hi {
            return Err(Error::IndexRange { index, lo, hi });
        }
        Ok(self.at_position((index + self.origin_index) as usize))
    }

    pub fn curve_index(&self, v: Vertex) -> Result<i64> {
        if !self.bx.contains(v) {
            return Err(Error::OutOfBox { vertex: v, side: self.bx.side });
        }
        Ok(self.position_of(v) as i64 - self.origin_index)
    }

    /// Vertices with signed index `<= k`, as a row-major bitmap.
    pub fn prefix_region(&self, k: i64) -> Result<Vec<bool>> {
        let (lo, hi) = self.index_range();
        if k < lo || k > hi {
            return Err(Error::IndexRange { index: k, lo, hi });
        }
        let last = (k + self.origin_index) as usize;
        let mut region = vec![false; self.len()];
        for &id in &self.order[..=last] {
            region[id as usize] = true;
        }
        Ok(region)
    }

    /// Vertex ids in curve order.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Serialize as the `PEANO1` dump: a 16-byte header (6-byte magic, two
    /// zero bytes, little-endian `u32` side, little-endian `i32` origin
    /// index) followed by little-endian `u32` vertex ids in curve order.
    pub fn write_dump<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = [0u8; 16];
        header[..6].copy_from_slice(DUMP_MAGIC);
        header[8..12].copy_from_slice(&self.bx.side.to_le_bytes());
        header[12..16].copy_from_slice(&(self.origin_index as i32).to_le_bytes());
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.order.len() * 4);
        for id in &self.order {
            buf.extend_from_slice(&id.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header).map_err(|e| Error::Format(e.to_string()))?;
        if &header[..6] != DUMP_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let side = u32::from_le_bytes(header[8..12].try_into().unwrap());
        let origin_index = i32::from_le_bytes(header[12..16].try_into().unwrap()) as i64;
        let bx = LatticeBox::new(side);
        let mut body = Vec::new();
        r.read_to_end(&mut body).map_err(|e| Error::Format(e.to_string()))?;
        if body.len() != bx.cells() * 4 {
            return Err(Error::Format(format!("{} body bytes for side {side}", body.len())));
        }
        let order: Vec<u32> = body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        let mut inverse = vec![u32::MAX; bx.cells()];
        for (k, &id) in order.iter().enumerate() {
            if id as usize >= bx.cells() || inverse[id as usize] != u32::MAX {
                return Err(Error::Format("order is not a permutation".into()));
            }
            inverse[id as usize] = k as u32;
        }
        if origin_index < 0 || origin_index as usize >= bx.cells() {
            return Err(Error::Format(format!("origin index {origin_index} out of range")));
        }
        Ok(Self { bx, order, inverse, origin_index })
    }
}

pub const DUMP_MAGIC: &[u8; 6] = b"PEANO1";

/// A point of a ray on one level: a primal vertex or a dual vertex
/// `(a + 1/2, b + 1/2)` stored by its lower-left indices (which may be `-1`
/// once the dual path has left the box).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RayPoint {
    Primal(Vertex),
    Dual(i64, i64),
}

impl RayPoint {
    /// Twice the spatial coordinate.
    #[inline]
    pub fn x2(self) -> i64 {
        match self {
            RayPoint::Primal(v) => v.x2(),
            RayPoint::Dual(a, b) => a - b,
        }
    }

    /// Coordinates in lattice units.
    pub fn coords(self) -> (f64, f64) {
        match self {
            RayPoint::Primal(v) => (v.i as f64, v.j as f64),
            RayPoint::Dual(a, b) => (a as f64 + 0.5, b as f64 + 0.5),
        }
    }
}

/// The ray of a vertex `p`: the dual path running down-left from the corner
/// `p - (1/2, 1/2)`, then `p` and its successor chain up to the root. It has
/// exactly one point on every level `0..=max_level`.
#[derive(Debug, Clone)]
pub struct Ray {
    pub vertex: Vertex,
    /// Indexed by level.
    points: Vec<RayPoint>,
}

impl Ray {
    pub fn new(forest: &SuccessorForest, dual: &DualForest, p: Vertex) -> Self {
        let max_level = forest.lattice().max_level();
        let mut points = Vec::with_capacity(max_level as usize + 1);
        // Dual corner of p sits on level level(p) - 1.
        let mut below = Vec::with_capacity(p.level() as usize);
        let (mut a, mut b) = (p.i as i64 - 1, p.j as i64 - 1);
        for _ in 0..p.level() {
            below.push(RayPoint::Dual(a, b));
            (a, b) = dual.next(a, b);
        }
        points.extend(below.into_iter().rev());
        points.extend(forest.chain(p).vertices().iter().map(|&v| RayPoint::Primal(v)));
        debug_assert_eq!(points.len(), max_level as usize + 1);
        Self { vertex: p, points }
    }

    #[inline]
    pub fn at_level(&self, k: u32) -> RayPoint {
        self.points[k as usize]
    }

    pub fn points(&self) -> &[RayPoint] {
        &self.points
    }

    /// Strictly left of `other`. Distinct rays never cross, and they differ on
    /// the lower of the two base levels.
    pub fn left_of(&self, other: &Ray) -> bool {
        if self.vertex == other.vertex {
            return false;
        }
        let k = self.vertex.level().min(other.vertex.level());
        self.at_level(k).x2() < other.at_level(k).x2()
    }

    /// Ray points that land on box cells: primal vertices and dual vertices
    /// mapped to their lower-left cell.
    pub fn cells(&self, bx: LatticeBox) -> impl Iterator<Item = Vertex> + '_ {
        self.points.iter().filter_map(move |p| match *p {
            RayPoint::Primal(v) => Some(v),
            RayPoint::Dual(a, b) if a >= 0 && b >= 0 => {
                let v = Vertex::new(a as u32, b as u32);
                bx.contains(v).then_some(v)
            }
            RayPoint::Dual(..) => None,
        })
    }
}

/// Discrete boundary of the curve segment between signed indices `k1 < k2`:
/// the cells of the two delimiting rays, as a row-major bitmap.
pub fn boundary_rays(
    curve: &PeanoCurve,
    forest: &SuccessorForest,
    dual: &DualForest,
    k1: i64,
    k2: i64,
) -> Result<Vec<bool>> {
    if k1 >= k2 {
        return Err(Error::Invalid(format!("boundary needs k1 < k2, got {k1} >= {k2}")));
    }
    let bx = curve.lattice();
    let mut cells = vec![false; bx.cells()];
    for k in [k1, k2] {
        let ray = Ray::new(forest, dual, curve.curve_lookup(k)?);
        for v in ray.cells(bx) {
            cells[bx.id(v)] = true;
        }
    }
    Ok(cells)
}

//! Exact small-instance checks: brute-force passage times, tree duality and
//! the Peano order.

use std::collections::VecDeque;

use super::table::{int, CsvTable};
use super::{farm, ExperimentConfig, ExperimentOutput};
use crate::error::Result;
use crate::field::{CounterRng, Seed, WeightField};
use crate::forest::{dual_successor_map, successor_map, DualStep, SuccessorForest};
use crate::lattice::{LatticeBox, Step, Vertex};
use crate::lpp::{brute_force_passage, geodesic_between, passage_time, value_grid_default};
use crate::peano::{peano_order, PeanoCurve, Ray};
use crate::report::Check;

const RAY_STREAM: u64 = 0x5241_5953;
const PREFIX_STREAM: u64 = 0x5052_4546;

/// Largest absolute deviation accepted between dynamic programming and
/// enumeration.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Default)]
struct OracleTally {
    pairs: u64,
    max_passage_diff: f64,
    max_geodesic_diff: f64,
    max_grid_diff: f64,
    mismatches: u64,
}

/// Every ordered pair `p <= q` of the box: dynamic programming against
/// enumeration, geodesic weight against passage time, and the value grid
/// against enumeration to the root.
pub(super) fn oracle(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let tallies = farm(config.workers, config.replicates, |r| {
        let field = WeightField::new(side, config.replicate_seed(r), config.storage)?;
        let bx = field.lattice();
        let grid = value_grid_default(&field);
        let mut t = OracleTally::default();
        for p in bx.iter() {
            for q in bx.iter().filter(|&q| p.below(q) && q != p) {
                let dp = passage_time(&field, p, q)?;
                let (bf, _) = brute_force_passage(&field, p, q)?;
                let path = geodesic_between(&field, p, q)?;
                let dpath = (path.weight(&field) - dp).abs();
                let dpass = (dp - bf).abs();
                t.pairs += 1;
                t.max_passage_diff = t.max_passage_diff.max(dpass);
                t.max_geodesic_diff = t.max_geodesic_diff.max(dpath);
                let ok_path = path.is_up_right() && path.start() == p && path.end() == q;
                if dpass > ORACLE_TOLERANCE || dpath > ORACLE_TOLERANCE || !ok_path {
                    t.mismatches += 1;
                }
                if q == bx.top_right() {
                    let dg = (grid.value(p) - bf).abs();
                    t.max_grid_diff = t.max_grid_diff.max(dg);
                    if dg > ORACLE_TOLERANCE {
                        t.mismatches += 1;
                    }
                }
            }
        }
        Ok(t)
    })?;

    let mut report = config.report(side as f64).param("tolerance", ORACLE_TOLERANCE);
    let mut table = CsvTable::new("replicates", &["replicate", "pairs", "mismatches"]);
    let mut total = OracleTally::default();
    for (r, t) in tallies.iter().enumerate() {
        table.row(vec![int(r), int(t.pairs), int(t.mismatches)]);
        total.pairs += t.pairs;
        total.mismatches += t.mismatches;
        total.max_passage_diff = total.max_passage_diff.max(t.max_passage_diff);
        total.max_geodesic_diff = total.max_geodesic_diff.max(t.max_geodesic_diff);
        total.max_grid_diff = total.max_grid_diff.max(t.max_grid_diff);
    }
    report.value("pairs", total.pairs);
    report.value("mismatches", total.mismatches);
    report.check(Check::at_most("passage_vs_enumeration", total.max_passage_diff, ORACLE_TOLERANCE));
    report.check(Check::at_most("geodesic_weight_vs_passage", total.max_geodesic_diff, ORACLE_TOLERANCE));
    report.check(Check::at_most("value_grid_vs_enumeration", total.max_grid_diff, ORACLE_TOLERANCE));
    report.check(Check::at_most("mismatches", total.mismatches as f64, 0.0));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Disjoint-set forest with path halving.
struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// False if `a` and `b` were already joined.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct DualityTally {
    cycles: u64,
    components: u64,
    roots: u64,
    /// Edges that are tree edges and also crossed by a dual step.
    crossings: u64,
    /// Edges that are neither.
    uncovered: u64,
}

/// Tree, dual crossings and edge partition of one forest. Edge `(i, j)` of
/// the horizontal family joins `(i, j)` to `(i + 1, j)`; of the vertical
/// family, `(i, j)` to `(i, j + 1)`.
fn duality_tally(forest: &SuccessorForest) -> DualityTally {
    let bx = forest.lattice();
    let n = bx.side as usize;
    let mut t = DualityTally::default();
    let mut uf = UnionFind::new(bx.cells());
    // Cover counts per edge: horizontal edges at [j * n + i], vertical after.
    let mut cover = vec![0u8; 2 * n * n];
    let h = |v: Vertex| v.j as usize * n + v.i as usize;
    let vert = |v: Vertex| n * n + v.j as usize * n + v.i as usize;
    for v in bx.iter() {
        match forest.step(v) {
            None => t.roots += 1,
            Some(s) => {
                let w = v.step(s);
                if !uf.union(bx.id(v) as u32, bx.id(w) as u32) {
                    t.cycles += 1;
                }
                cover[if s == Step::Right { h(v) } else { vert(v) }] += 1;
            }
        }
    }
    let dual = dual_successor_map(forest);
    for b in 0..dual.faces() {
        for a in 0..dual.faces() {
            let corner = Vertex::new(a, b);
            cover[match dual.step(a, b) {
                DualStep::Down => h(corner),
                DualStep::Left => vert(corner),
            }] += 1;
        }
    }
    let mut roots = std::collections::BTreeSet::new();
    for id in 0..bx.cells() as u32 {
        roots.insert(uf.find(id));
    }
    t.components = roots.len() as u64;
    for v in bx.iter() {
        if v.i + 1 < bx.side {
            match cover[h(v)] {
                0 => t.uncovered += 1,
                1 => {}
                _ => t.crossings += 1,
            }
        }
        if v.j + 1 < bx.side {
            match cover[vert(v)] {
                0 => t.uncovered += 1,
                1 => {}
                _ => t.crossings += 1,
            }
        }
    }
    t
}

pub(super) fn duality(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let tallies = farm(config.workers, config.replicates, |r| {
        let field = WeightField::new(side, config.replicate_seed(r), config.storage)?;
        let forest = successor_map(&field, &value_grid_default(&field))?;
        Ok(duality_tally(&forest))
    })?;
    let mut report = config.report(side as f64);
    let mut table = CsvTable::new("replicates", &["replicate", "cycles", "components", "crossings", "uncovered"]);
    let mut bad_trees = 0u64;
    let (mut crossings, mut uncovered) = (0u64, 0u64);
    for (r, t) in tallies.iter().enumerate() {
        table.row(vec![int(r), int(t.cycles), int(t.components), int(t.crossings), int(t.uncovered)]);
        if t.cycles > 0 || t.components != 1 || t.roots != 1 {
            bad_trees += 1;
        }
        crossings += t.crossings;
        uncovered += t.uncovered;
    }
    report.value("edges_per_replicate", 2 * side as u64 * (side as u64 - 1));
    report.check(Check::at_most("replicates_not_spanning_tree", bad_trees as f64, 0.0));
    report.check(Check::at_most("dual_crossings_of_tree_edges", crossings as f64, 0.0));
    report.check(Check::at_most("edges_in_neither_family", uncovered as f64, 0.0));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// True when `order` visits every vertex exactly once and agrees with the
/// position lookup.
fn is_bijective(curve: &PeanoCurve) -> bool {
    let mut seen = vec![false; curve.len()];
    for (k, &id) in curve.order().iter().enumerate() {
        let id = id as usize;
        if id >= seen.len() || seen[id] {
            return false;
        }
        seen[id] = true;
        if curve.position_of(curve.lattice().vertex(id)) != k {
            return false;
        }
    }
    true
}

/// Pairs whose curve order disagrees with the left-of relation of their rays.
pub fn ray_order_disagreements(curve: &PeanoCurve, forest: &SuccessorForest) -> u64 {
    let dual = dual_successor_map(forest);
    let bx = forest.lattice();
    let rays: Vec<Ray> = bx.iter().map(|v| Ray::new(forest, &dual, v)).collect();
    let mut bad = 0;
    for a in &rays {
        for b in &rays {
            if a.vertex == b.vertex {
                continue;
            }
            let before = curve.position_of(a.vertex) < curve.position_of(b.vertex);
            if before != a.left_of(b) {
                bad += 1;
            }
        }
    }
    bad
}

/// Edge connectivity of a row-major region.
pub fn is_edge_connected(bx: LatticeBox, region: &[bool]) -> bool {
    let Some(start) = region.iter().position(|&b| b) else { return true };
    let mut seen = vec![false; region.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut reached = 1usize;
    while let Some(id) = queue.pop_front() {
        let v = bx.vertex(id);
        let mut nbrs = [None; 4];
        if v.i > 0 {
            nbrs[0] = Some(Vertex::new(v.i - 1, v.j));
        }
        if v.j > 0 {
            nbrs[1] = Some(Vertex::new(v.i, v.j - 1));
        }
        nbrs[2] = Some(Vertex::new(v.i + 1, v.j));
        nbrs[3] = Some(Vertex::new(v.i, v.j + 1));
        for w in nbrs.into_iter().flatten().filter(|&w| bx.contains(w)) {
            let wid = bx.id(w);
            if region[wid] && !seen[wid] {
                seen[wid] = true;
                reached += 1;
                queue.push_back(wid);
            }
        }
    }
    reached == region.iter().filter(|&&b| b).count()
}

#[derive(Debug, Default, Clone, Copy)]
struct PeanoTally {
    non_bijective: u64,
    disconnected_prefixes: u64,
    ray_disagreements: u64,
}

pub(super) fn peano(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let ray_box: u32 = config.param("ray_box", 8)?;
    let ray_seeds: usize = config.param("ray_seeds", 50)?;
    let prefixes: u64 = config.param("prefixes", 100)?;
    if !(2..=16).contains(&ray_box) {
        return Err(crate::error::invalid("ray_box must be in [2, 16]"));
    }
    let prefix_tallies = farm(config.workers, config.replicates, |r| {
        let seed = config.replicate_seed(r);
        let field = WeightField::new(side, seed, config.storage)?;
        let forest = successor_map(&field, &value_grid_default(&field))?;
        let curve = peano_order(&forest);
        let mut t = PeanoTally::default();
        if !is_bijective(&curve) {
            t.non_bijective += 1;
        }
        let rng = CounterRng::new(seed.derive(PREFIX_STREAM));
        for p in 0..prefixes {
            let k = (rng.u64_at(p) % curve.len() as u64) as i64;
            if !is_edge_connected(curve.lattice(), &curve.prefix_region(k)?) {
                t.disconnected_prefixes += 1;
            }
        }
        Ok(t)
    })?;
    let ray_tallies = farm(config.workers, ray_seeds, |r| {
        let seed = Seed::new(config.seed, r as u64).derive(RAY_STREAM);
        let field = WeightField::new(ray_box, seed, config.storage)?;
        let forest = successor_map(&field, &value_grid_default(&field))?;
        let curve = peano_order(&forest);
        Ok(PeanoTally {
            non_bijective: u64::from(!is_bijective(&curve)),
            disconnected_prefixes: 0,
            ray_disagreements: ray_order_disagreements(&curve, &forest),
        })
    })?;

    let mut report = config
        .report(side as f64)
        .param("ray_box", ray_box)
        .param("ray_seeds", ray_seeds)
        .param("prefixes", prefixes);
    let mut table = CsvTable::new(
        "replicates",
        &["family", "replicate", "non_bijective", "disconnected_prefixes", "ray_disagreements"],
    );
    let mut sum = PeanoTally::default();
    for (family, tallies) in [("prefix", &prefix_tallies), ("ray", &ray_tallies)] {
        for (r, t) in tallies.iter().enumerate() {
            table.row(vec![
                family.to_string(),
                int(r),
                int(t.non_bijective),
                int(t.disconnected_prefixes),
                int(t.ray_disagreements),
            ]);
            sum.non_bijective += t.non_bijective;
            sum.disconnected_prefixes += t.disconnected_prefixes;
            sum.ray_disagreements += t.ray_disagreements;
        }
    }
    report.value("prefixes_tested", prefixes * config.replicates as u64);
    report.check(Check::at_most("non_bijective_orders", sum.non_bijective as f64, 0.0));
    report.check(Check::at_most("ray_order_disagreements", sum.ray_disagreements as f64, 0.0));
    report.check(Check::at_most("disconnected_prefixes", sum.disconnected_prefixes as f64, 0.0));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_detects_cycles() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(uf.union(1, 2));
        assert!(!uf.union(2, 0));
    }

    #[test]
    fn connectivity_of_small_regions() {
        let bx = LatticeBox::new(3);
        let mut r = vec![false; 9];
        assert!(is_edge_connected(bx, &r));
        r[bx.id(Vertex::new(0, 0))] = true;
        r[bx.id(Vertex::new(1, 1))] = true;
        assert!(!is_edge_connected(bx, &r));
        r[bx.id(Vertex::new(1, 0))] = true;
        assert!(is_edge_connected(bx, &r));
    }

    #[test]
    fn duality_partitions_edges() {
        let field = WeightField::on_demand(20, Seed::new(2, 0)).unwrap();
        let forest = successor_map(&field, &value_grid_default(&field)).unwrap();
        let t = duality_tally(&forest);
        assert_eq!((t.cycles, t.components, t.roots, t.crossings, t.uncovered), (0, 1, 1, 0, 0));
    }
}

use mtl_core::field::{Seed, StorageMode, WeightField};
use mtl_core::forest::successor_map;
use mtl_core::lpp::{geodesic_between, passage_time, value_grid, value_grid_default};
use mtl_core::stats::sample::{ks_statistic, mean, sorted, variance};
use mtl_core::{Step, Vertex};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Exp};

/// Maximum over every up-right path from `p` to `q` of the weight sum, `p`
/// excluded, by plain recursion.
fn enumerate_paths(w: &dyn Fn(u32, u32) -> f64, p: (u32, u32), q: (u32, u32)) -> f64 {
    if p == q {
        return 0.0;
    }
    let mut best = f64::NEG_INFINITY;
    if p.0 < q.0 {
        best = best.max(w(p.0 + 1, p.1) + enumerate_paths(w, (p.0 + 1, p.1), q));
    }
    if p.1 < q.1 {
        best = best.max(w(p.0, p.1 + 1) + enumerate_paths(w, (p.0, p.1 + 1), q));
    }
    best
}

fn small_field() -> impl Strategy<Value = (u32, Vec<f64>)> {
    (2u32..=6).prop_flat_map(|side| (Just(side), prop::collection::vec(0.0f64..5.0, (side * side) as usize)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn passage_times_match_path_enumeration((side, weights) in small_field()) {
        let field = WeightField::from_weights(side, weights.clone()).unwrap();
        let w = |i: u32, j: u32| weights[(j * side + i) as usize];
        for p in field.lattice().iter() {
            for q in field.lattice().iter().filter(|q| p.below(*q)) {
                let want = enumerate_paths(&w, (p.i, p.j), (q.i, q.j));
                let got = passage_time(&field, p, q).unwrap();
                prop_assert!((got - want).abs() < 1e-9, "{p} -> {q}: {got} vs {want}");
                let path = geodesic_between(&field, p, q).unwrap();
                prop_assert!(path.is_up_right());
                prop_assert!((path.weight(&field) - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn value_grid_matches_enumeration_to_any_root((side, weights) in small_field(), ri in 0u32..6, rj in 0u32..6) {
        let field = WeightField::from_weights(side, weights.clone()).unwrap();
        let root = Vertex::new(ri % side, rj % side);
        let grid = value_grid(&field, root).unwrap();
        let w = |i: u32, j: u32| weights[(j * side + i) as usize];
        for v in field.lattice().iter() {
            if v.below(root) {
                let want = enumerate_paths(&w, (v.i, v.j), (root.i, root.j));
                prop_assert!((grid.value(v) - want).abs() < 1e-9);
            } else {
                prop_assert!(grid.get(v).is_err() || grid.value(v) == f64::NEG_INFINITY);
            }
        }
    }

    #[test]
    fn successors_follow_the_larger_value((side, weights) in small_field()) {
        let field = WeightField::from_weights(side, weights).unwrap();
        let grid = value_grid_default(&field);
        let forest = successor_map(&field, &grid).unwrap();
        for v in field.lattice().iter().filter(|&v| v != forest.root()) {
            let s = forest.succ(v).unwrap();
            let through = grid.value(s) + field.weight(s).unwrap();
            prop_assert!((grid.value(v) - through).abs() < 1e-9);
            if v.i + 1 == side {
                prop_assert_eq!(forest.step(v), Some(Step::Up));
            }
            if v.j + 1 == side {
                prop_assert_eq!(forest.step(v), Some(Step::Right));
            }
        }
    }
}

#[test]
fn ties_go_up() {
    let field = WeightField::from_weights(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
    let forest = successor_map(&field, &value_grid_default(&field)).unwrap();
    assert_eq!(forest.step(Vertex::new(0, 0)), Some(Step::Up));
}

#[test]
fn weights_are_standard_exponential() {
    let field = WeightField::on_demand(400, Seed::new(2024, 0)).unwrap();
    let xs: Vec<f64> = field.lattice().iter().map(|v| field.weight(v).unwrap()).collect();
    let exp = Exp::new(1.0).unwrap();
    let ks = ks_statistic(&sorted(xs.clone()), |x| exp.cdf(x));
    // 160000 samples: the 0.1% critical value is 1.95 / 400
    assert!(ks < 1.95 / 400.0, "ks {ks}");
    assert!((mean(&xs) - 1.0).abs() < 0.01);
    assert!((variance(&xs) - 1.0).abs() < 0.02);
}

#[test]
fn storage_modes_and_seeds_are_consistent() {
    let a = WeightField::new(37, Seed::new(5, 3), StorageMode::OnDemand).unwrap();
    let b = WeightField::new(37, Seed::new(5, 3), StorageMode::Materialized).unwrap();
    let c = WeightField::new(37, Seed::new(5, 4), StorageMode::OnDemand).unwrap();
    let mut differ = 0;
    for v in a.lattice().iter() {
        assert_eq!(a.weight(v).unwrap().to_bits(), b.weight(v).unwrap().to_bits());
        differ += (a.weight(v).unwrap() != c.weight(v).unwrap()) as usize;
    }
    assert_eq!(differ, 37 * 37);
    // A larger box extends the same field.
    let big = WeightField::on_demand(64, Seed::new(5, 3)).unwrap();
    assert!(a.lattice().iter().all(|v| big.weight(v).unwrap() == a.weight(v).unwrap()));
}

#[test]
fn passage_rejects_unordered_and_outside_pairs() {
    let field = WeightField::on_demand(8, Seed::new(1, 0)).unwrap();
    assert!(passage_time(&field, Vertex::new(3, 3), Vertex::new(2, 5)).is_err());
    assert!(passage_time(&field, Vertex::new(0, 0), Vertex::new(8, 0)).is_err());
    assert_eq!(passage_time(&field, Vertex::new(4, 4), Vertex::new(4, 4)).unwrap(), 0.0);
}

#[test]
fn point_to_point_mean_is_linear_in_time() {
    // E T((0,0),(m,m)) = 4m - O(m^{1/3}); the fluctuation mean is about -1.77 * 2^{4/3} m^{1/3}.
    let m = 400u32;
    let reps = 40;
    let ts: Vec<f64> = (0..reps)
        .map(|r| {
            let f = WeightField::on_demand(m + 1, Seed::new(77, r)).unwrap();
            passage_time(&f, Vertex::new(0, 0), Vertex::new(m, m)).unwrap()
        })
        .collect();
    let per_step = mean(&ts) / m as f64;
    assert!((3.85..4.0).contains(&per_step), "{per_step}");
}

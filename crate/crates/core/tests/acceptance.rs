//! End-to-end acceptance run: every criterion at its default configuration,
//! one PASS/FAIL line each. Tolerances are pinned here, independently of the
//! bands each experiment reports. Takes on the order of ten minutes.

use std::time::{Duration, Instant};

use mtl_core::experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentOutput};
use mtl_core::report::StatReport;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    soft: bool,
    detail: String,
}

fn run(kind: ExperimentKind) -> (StatReport, Duration) {
    let start = Instant::now();
    let out = run_experiment(&ExperimentConfig::new(kind)).expect("experiment runs");
    (out.report, start.elapsed())
}

fn value(report: &StatReport, check: &str) -> f64 {
    report
        .checks
        .iter()
        .find(|c| c.name == check)
        .unwrap_or_else(|| panic!("{} has no check {check}", report.estimator))
        .value
}

/// Pinned comparisons, accumulated with a readable trail.
struct Judge {
    pass: bool,
    notes: Vec<String>,
}

impl Judge {
    fn new() -> Self {
        Self { pass: true, notes: Vec::new() }
    }

    fn within(&mut self, name: &str, v: f64, lo: f64, hi: f64) -> &mut Self {
        let ok = v >= lo && v <= hi;
        self.pass &= ok;
        self.notes.push(format!("{name}={v:.4} in [{lo:.4}, {hi:.4}]{}", if ok { "" } else { " (x)" }));
        self
    }

    fn at_most(&mut self, name: &str, v: f64, hi: f64) -> &mut Self {
        let ok = v <= hi;
        self.pass &= ok;
        self.notes.push(format!("{name}={v:.4e} <= {hi:e}{}", if ok { "" } else { " (x)" }));
        self
    }

    fn at_least(&mut self, name: &str, v: f64, lo: f64) -> &mut Self {
        let ok = v >= lo;
        self.pass &= ok;
        self.notes.push(format!("{name}={v:.4} >= {lo}{}", if ok { "" } else { " (x)" }));
        self
    }

    fn time(&mut self, took: Duration, limit: Option<Duration>) -> &mut Self {
        let ok = limit.is_none_or(|l| took <= l);
        self.pass &= ok;
        match limit {
            Some(l) => self.notes.push(format!("{:.1}s <= {}s{}", took.as_secs_f64(), l.as_secs(), if ok { "" } else { " (x)" })),
            None => self.notes.push(format!("{:.1}s", took.as_secs_f64())),
        }
        self
    }

    fn outcome(&self, id: u32, title: &'static str) -> Outcome {
        Outcome { id, title, pass: self.pass, soft: false, detail: self.notes.join(", ") }
    }
}

fn oracle() -> Outcome {
    let (r, took) = run(ExperimentKind::Oracle);
    let mut j = Judge::new();
    assert_eq!(r.params["box"], 7);
    assert_eq!(r.replicates, 1000);
    j.at_most("passage", value(&r, "passage_vs_enumeration"), 1e-9)
        .at_most("geodesic", value(&r, "geodesic_weight_vs_passage"), 1e-9)
        .at_most("grid", value(&r, "value_grid_vs_enumeration"), 1e-9)
        .at_most("mismatches", value(&r, "mismatches"), 0.0)
        .time(took, Some(Duration::from_secs(60)));
    j.outcome(1, "oracle equivalence")
}

fn duality() -> Outcome {
    let (r, took) = run(ExperimentKind::Duality);
    let mut j = Judge::new();
    j.at_most("not_spanning", value(&r, "replicates_not_spanning_tree"), 0.0)
        .at_most("dual_crossings", value(&r, "dual_crossings_of_tree_edges"), 0.0)
        .at_most("uncovered", value(&r, "edges_in_neither_family"), 0.0)
        .time(took, Some(Duration::from_secs(120)));
    j.outcome(2, "duality")
}

fn peano() -> Outcome {
    let (r, took) = run(ExperimentKind::Peano);
    let mut j = Judge::new();
    j.at_most("non_bijective", value(&r, "non_bijective_orders"), 0.0)
        .at_most("ray_disagreements", value(&r, "ray_order_disagreements"), 0.0)
        .at_most("disconnected", value(&r, "disconnected_prefixes"), 0.0)
        .time(took, Some(Duration::from_secs(120)));
    j.outcome(3, "peano correctness")
}

fn busemann() -> Outcome {
    let (r, took) = run(ExperimentKind::Busemann);
    let mut j = Judge::new();
    j.at_least("count", value(&r, "increment_count"), 1e4)
        .within("mean", value(&r, "mean"), -0.1, 0.1)
        .within("variance", value(&r, "variance"), 7.2, 8.8)
        .at_most("ks", value(&r, "ks_laplace"), 0.05)
        .time(took, None);
    j.outcome(4, "busemann walk")
}

fn lln() -> Outcome {
    let (r, took) = run(ExperimentKind::Lln);
    let mut j = Judge::new();
    j.within("mean_over_n", value(&r, "mean_over_n"), 3.9, 4.0)
        .within("std_slope", value(&r, "std_slope"), 1.0 / 3.0 - 0.08, 1.0 / 3.0 + 0.08)
        .time(took, None);
    j.outcome(5, "lln and fluctuation exponent")
}

fn transversal() -> Outcome {
    let (r, took) = run(ExperimentKind::Transversal);
    let mut j = Judge::new();
    j.within("slope", value(&r, "slope"), 2.0 / 3.0 - 0.08, 2.0 / 3.0 + 0.08).time(took, None);
    j.outcome(6, "transversal exponent")
}

fn exponents() -> Outcome {
    let (r, took) = run(ExperimentKind::Exponents);
    let mut j = Judge::new();
    assert_eq!(r.n, 1024.0);
    j.within("slope_u", value(&r, "slope_u"), 0.55, 0.65)
        .within("slope_h", value(&r, "slope_h"), 0.35, 0.45)
        .time(took, None);
    j.outcome(7, "curve scaling exponents")
}

fn variation() -> Outcome {
    let (r, took) = run(ExperimentKind::Variation);
    let mut j = Judge::new();
    j.at_most("alpha5_spread", value(&r, "alpha5_spread_across_rates"), 1.5)
        .at_most("alpha5_vs_ehat", value(&r, "alpha5_factor_from_ehat_length"), 1.5)
        .at_least("alpha4_growth", value(&r, "alpha4_growth"), 3.0)
        .at_least("alpha6_shrink", value(&r, "alpha6_shrink"), 3.0)
        .time(took, None);
    j.outcome(8, "fifth variation")
}

fn pullback() -> Outcome {
    let (r, took) = run(ExperimentKind::Pullback);
    let mut j = Judge::new();
    j.within("horizontal", value(&r, "horizontal_dimension"), 0.32, 0.48)
        .within("vertical", value(&r, "vertical_dimension"), 0.52, 0.68)
        .at_most("geodesic", value(&r, "geodesic_dimension"), 0.68)
        .time(took, None);
    j.outcome(9, "pullback dimensions")
}

fn fractal() -> Outcome {
    let (r, took) = run(ExperimentKind::Fractal);
    let mut j = Judge::new();
    let (lo, hi) = (4.0 / 3.0 - 0.15, 4.0 / 3.0 + 0.15);
    j.within("geodesic", value(&r, "geodesic_dimension"), lo, hi)
        .within("boundary", value(&r, "boundary_dimension"), lo, hi)
        .time(took, None);
    let mut o = j.outcome(10, "fractal boundary (soft)");
    o.soft = true;
    o
}

fn vr() -> Outcome {
    let (r, took) = run(ExperimentKind::Vr);
    let mut j = Judge::new();
    j.at_most("ks_256_vs_512", value(&r, "ks_between_scales"), 0.1)
        .at_least("monotone_256", value(&r, "tail_monotone_256"), 1.0)
        .at_least("monotone_512", value(&r, "tail_monotone_512"), 1.0)
        .at_least("monotone_pooled", value(&r, "pooled_tail_monotone"), 1.0)
        .at_least("drop_0.3_to_0.03", value(&r, "tail_drop_0.3_to_0.03"), 5.0)
        .time(took, None);
    j.outcome(11, "volume stabilization")
}

fn output_bytes(out: &ExperimentOutput) -> Vec<u8> {
    let mut bytes = out.report.to_json().into_bytes();
    for t in &out.tables {
        bytes.extend(t.to_csv().into_bytes());
    }
    bytes
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let configs = [
        ExperimentConfig::new(ExperimentKind::Oracle).with_box(6).with_replicates(40),
        ExperimentConfig::new(ExperimentKind::Duality).with_box(64).with_replicates(8),
        ExperimentConfig::new(ExperimentKind::Busemann).with_box(512).with_replicates(5),
        ExperimentConfig::new(ExperimentKind::Exponents).with_box(512).with_replicates(5),
        ExperimentConfig::new(ExperimentKind::Holder).with_box(512).with_replicates(5),
        ExperimentConfig::new(ExperimentKind::Pullback).with_box(512).with_replicates(3),
    ];
    let mut mismatched = Vec::new();
    for config in configs {
        let reference = output_bytes(&run_experiment(&config).expect("experiment runs"));
        for workers in [1, 4, 16] {
            for _ in 0..2 {
                let again = output_bytes(&run_experiment(&config.clone().with_workers(workers)).expect("experiment runs"));
                if again != reference {
                    mismatched.push(format!("{}@{workers}", config.experiment));
                }
            }
        }
    }
    let mut j = Judge::new();
    j.at_most("mismatched_runs", mismatched.len() as f64, 0.0).time(start.elapsed(), None);
    if !mismatched.is_empty() {
        j.notes.push(mismatched.join(" "));
    }
    j.outcome(12, "determinism across workers")
}

#[test]
fn acceptance() {
    let criteria: [fn() -> Outcome; 12] = [
        oracle, duality, peano, busemann, lln, transversal, exponents, variation, pullback, fractal, vr, determinism,
    ];
    let mut outcomes = Vec::new();
    println!();
    for criterion in criteria {
        let o = criterion();
        let verdict = match (o.pass, o.soft) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2} {verdict} {}: {}", o.id, o.title, o.detail);
        outcomes.push(o);
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass && !o.soft).map(|o| format!("{} ({})", o.id, o.title)).collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}

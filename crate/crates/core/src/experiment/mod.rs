//! Experiment drivers: configuration, replicate farming and the estimators
//! behind every report.
//!
//! Every replicate `r` draws its field from `Seed::new(seed, r)` (or a derived
//! family of it), replicates are farmed over a worker pool, and results are
//! aggregated in replicate order with compensated sums. Reports therefore
//! depend only on the configuration, never on the worker count.

mod curves;
mod oracles;
mod scaling;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Seed, StorageMode, WeightField};
use crate::forest::{dual_successor_map, successor_map, DualForest, SuccessorForest};
use crate::lattice::Vertex;
use crate::lpp::value_grid_default;
use crate::peano::{peano_order, PeanoCurve};
use crate::report::StatReport;
use crate::rescale::RescaledFrame;

pub use oracles::{is_edge_connected, ray_order_disagreements};
pub use table::CsvTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Oracle,
    Duality,
    Peano,
    Busemann,
    Lln,
    Transversal,
    Exponents,
    Variation,
    Holder,
    Pullback,
    Fractal,
    Vr,
    Render,
    Bench,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 14] = [
        ExperimentKind::Oracle,
        ExperimentKind::Duality,
        ExperimentKind::Peano,
        ExperimentKind::Busemann,
        ExperimentKind::Lln,
        ExperimentKind::Transversal,
        ExperimentKind::Exponents,
        ExperimentKind::Variation,
        ExperimentKind::Holder,
        ExperimentKind::Pullback,
        ExperimentKind::Fractal,
        ExperimentKind::Vr,
        ExperimentKind::Render,
        ExperimentKind::Bench,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Oracle => "oracle",
            ExperimentKind::Duality => "duality",
            ExperimentKind::Peano => "peano",
            ExperimentKind::Busemann => "busemann",
            ExperimentKind::Lln => "lln",
            ExperimentKind::Transversal => "transversal",
            ExperimentKind::Exponents => "exponents",
            ExperimentKind::Variation => "variation",
            ExperimentKind::Holder => "holder",
            ExperimentKind::Pullback => "pullback",
            ExperimentKind::Fractal => "fractal",
            ExperimentKind::Vr => "vr",
            ExperimentKind::Render => "render",
            ExperimentKind::Bench => "bench",
        }
    }

    /// Default `(box side, replicates)`.
    fn defaults(self) -> (u32, usize) {
        match self {
            ExperimentKind::Oracle => (7, 1000),
            ExperimentKind::Duality => (256, 100),
            ExperimentKind::Peano => (128, 20),
            ExperimentKind::Busemann => (2048, 24),
            ExperimentKind::Lln => (2001, 100),
            ExperimentKind::Transversal => (2048, 100),
            ExperimentKind::Exponents => (4096, 50),
            ExperimentKind::Variation => (4096, 30),
            ExperimentKind::Holder => (4096, 20),
            ExperimentKind::Pullback => (4096, 20),
            ExperimentKind::Fractal => (4096, 10),
            ExperimentKind::Vr => (2048, 500),
            ExperimentKind::Render => (512, 1),
            ExperimentKind::Bench => (1024, 3),
        }
    }

    /// Experiments whose statistics need a box of at least 64.
    fn is_statistical(self) -> bool {
        !matches!(self, ExperimentKind::Oracle | ExperimentKind::Bench | ExperimentKind::Render)
    }

    /// Experiments that read the scale parameter `n`.
    fn uses_scale(self) -> bool {
        matches!(
            self,
            ExperimentKind::Exponents
                | ExperimentKind::Variation
                | ExperimentKind::Holder
                | ExperimentKind::Pullback
                | ExperimentKind::Fractal
                | ExperimentKind::Render
        )
    }

    /// Extra parameter keys the experiment understands.
    fn known_params(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Oracle => &["pairs"],
            ExperimentKind::Duality => &[],
            ExperimentKind::Peano => &["ray_box", "ray_seeds", "prefixes"],
            ExperimentKind::Busemann => &["half_window", "level"],
            ExperimentKind::Lln => &["scales", "mean_scale"],
            ExperimentKind::Transversal => &["levels"],
            ExperimentKind::Exponents => &["v_exp_min", "v_exp_max", "anchors", "anchor_window"],
            ExperimentKind::Variation => &["half_interval", "rates", "ehat_exp", "ehat_anchors"],
            ExperimentKind::Holder => &["half_window", "delta_exp_min", "delta_exp_max", "pairs"],
            ExperimentKind::Pullback => &["size_exp_min", "size_exp_max", "half_width", "half_time", "geodesic_time"],
            ExperimentKind::Fractal => &["size_exp_min", "size_exp_max", "segment", "window"],
            ExperimentKind::Vr => &["scales", "bases", "spacing", "eps"],
            ExperimentKind::Render => &["window", "volume", "width"],
            ExperimentKind::Bench => &[],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                invalid(format!("unknown experiment '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

/// Default memory cap for concurrently built replicates: 3 GiB.
pub const DEFAULT_MEMORY_CAP: u64 = 3 << 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub box_side: u32,
    /// Scale `n`; `None` picks the experiment's default frame.
    pub scale: Option<f64>,
    pub seed: u64,
    pub replicates: usize,
    /// Worker threads; never recorded in reports.
    pub workers: usize,
    pub storage: StorageMode,
    pub memory_cap: u64,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        let (box_side, replicates) = experiment.defaults();
        Self {
            experiment,
            box_side,
            scale: None,
            seed: 1,
            replicates,
            workers: 1,
            storage: StorageMode::OnDemand,
            memory_cap: DEFAULT_MEMORY_CAP,
            params: BTreeMap::new(),
        }
    }

    pub fn with_box(mut self, side: u32) -> Self {
        self.box_side = side;
        self
    }

    pub fn with_scale(mut self, n: f64) -> Self {
        self.scale = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_replicates(mut self, r: usize) -> Self {
        self.replicates = r;
        self
    }

    pub fn with_workers(mut self, w: usize) -> Self {
        self.workers = w;
        self
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Scale `n` used by curve experiments: `N / 4` unless set.
    pub fn curve_scale(&self) -> f64 {
        self.scale.unwrap_or(self.box_side as f64 / 4.0)
    }

    /// Bytes held by one replicate while it is being processed.
    pub fn replicate_bytes(&self) -> u64 {
        let cells = self.box_side as u64 * self.box_side as u64;
        let weights = if self.storage == StorageMode::Materialized { 8 * cells } else { 0 };
        let per_cell = match self.experiment {
            ExperimentKind::Oracle | ExperimentKind::Lln => 0,
            // Value grid and union-find / edge bitmaps.
            ExperimentKind::Duality => 8 + 8,
            // Value grid; the curve (two u32 arrays) is built after it is dropped.
            _ => 8,
        };
        weights + per_cell * cells
    }

    /// Checks the configuration; messages say how to fix it.
    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment;
        if self.replicates == 0 {
            return Err(invalid("--replicates must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("--workers must be at least 1"));
        }
        if kind == ExperimentKind::Oracle {
            if !(2..=crate::lpp::BRUTE_FORCE_LIMIT + 1).contains(&self.box_side) {
                return Err(invalid(format!(
                    "oracle --box must be in [2, {}] (brute-force enumeration limit)",
                    crate::lpp::BRUTE_FORCE_LIMIT + 1
                )));
            }
        } else if kind.is_statistical() && self.box_side < 64 {
            return Err(invalid(format!("{kind} needs --box >= 64, got {}", self.box_side)));
        } else if self.box_side < 2 {
            return Err(invalid("--box must be at least 2"));
        }
        if let Some(n) = self.scale {
            if !kind.uses_scale() {
                return Err(invalid(format!("{kind} does not take --scale")));
            }
            if !(n > 0.0) || n > self.box_side as f64 / 2.0 {
                return Err(invalid(format!("--scale must be in (0, N/2] = (0, {}], got {n}", self.box_side / 2)));
            }
        }
        let known = kind.known_params();
        if let Some(k) = self.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(invalid(format!(
                "{kind} has no parameter '{k}'; known: {}",
                if known.is_empty() { "none".to_string() } else { known.join(", ") }
            )));
        }
        let concurrent = self.workers.min(self.replicates) as u64;
        let need = self.replicate_bytes().saturating_mul(concurrent);
        if need > self.memory_cap {
            let hint = if self.storage == StorageMode::Materialized {
                "use on-demand weights, fewer workers, or a smaller --box"
            } else {
                "use fewer workers or a smaller --box"
            };
            return Err(invalid(format!(
                "estimated {} MiB for {concurrent} concurrent replicates exceeds the {} MiB cap; {hint}",
                need >> 20,
                self.memory_cap >> 20
            )));
        }
        Ok(())
    }

    fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| invalid(format!("parameter {key}='{s}' is not a valid value"))),
        }
    }

    fn param_list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|p| p.trim().parse().map_err(|_| invalid(format!("parameter {key}: bad entry '{p}'"))))
                .collect(),
        }
    }

    fn report(&self, n: f64) -> StatReport {
        StatReport::new(self.experiment.name(), n, self.seed, self.replicates)
            .param("box", self.box_side)
            .param("storage", self.storage)
    }

    fn replicate_seed(&self, r: usize) -> Seed {
        Seed::new(self.seed, r as u64)
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: StatReport,
    pub tables: Vec<CsvTable>,
    pub svg: Option<String>,
}

impl ExperimentOutput {
    fn new(report: StatReport) -> Self {
        Self { report, tables: Vec::new(), svg: None }
    }
}

/// Runs `f` on replicates `0..count` with `workers` threads; results come
/// back in replicate order.
pub fn farm<T, F>(workers: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| invalid(format!("cannot start {workers} workers: {e}")))?;
        return pool.install(|| (0..count).into_par_iter().map(&f).collect());
    }
    let _ = workers;
    (0..count).map(f).collect()
}

/// Tree, dual and curve of one replicate.
pub struct Replicate {
    pub forest: SuccessorForest,
    pub dual: Option<DualForest>,
    pub curve: Option<PeanoCurve>,
}

/// Builds one replicate; the value grid is dropped before the curve is built.
pub fn build_replicate(
    side: u32,
    seed: Seed,
    storage: StorageMode,
    curve_origin: Option<Vertex>,
    with_dual: bool,
) -> Result<Replicate> {
    let field = WeightField::new(side, seed, storage)?;
    let forest = {
        let grid = value_grid_default(&field);
        successor_map(&field, &grid)?
    };
    drop(field);
    let dual = with_dual.then(|| dual_successor_map(&forest));
    let curve = match curve_origin {
        Some(o) => Some(peano_order(&forest).with_origin(o)?),
        None => None,
    };
    Ok(Replicate { forest, dual, curve })
}

/// Frame used by curve statistics: scale `n`, origin at the box center, so
/// the curve near volume 0 is far from every edge of the box.
pub fn centered_frame(side: u32, n: f64) -> Result<RescaledFrame> {
    RescaledFrame::new(side, n, Vertex::new(side / 2, side / 2))
}

/// Runs a validated experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Oracle => oracles::oracle(config),
        ExperimentKind::Duality => oracles::duality(config),
        ExperimentKind::Peano => oracles::peano(config),
        ExperimentKind::Busemann => scaling::busemann(config),
        ExperimentKind::Lln => scaling::lln(config),
        ExperimentKind::Transversal => scaling::transversal(config),
        ExperimentKind::Vr => scaling::vr(config),
        ExperimentKind::Exponents => curves::exponents(config),
        ExperimentKind::Variation => curves::variation(config),
        ExperimentKind::Holder => curves::holder(config),
        ExperimentKind::Pullback => curves::pullback(config),
        ExperimentKind::Fractal => curves::fractal(config),
        ExperimentKind::Render => curves::render(config),
        ExperimentKind::Bench => bench(config),
    }
}

/// Stage timings of the replicate pipeline. Timing values are the only
/// nondeterministic report content in the crate.
fn bench(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let stages = ["field", "value_grid", "successor_map", "dual_map", "peano_order"];
    let timings = farm(1, config.replicates, |r| {
        let mut t = Vec::with_capacity(stages.len());
        let clock = Instant::now();
        let field = WeightField::new(side, config.replicate_seed(r), StorageMode::Materialized)?;
        t.push(clock.elapsed().as_secs_f64());
        let grid = value_grid_default(&field);
        t.push(clock.elapsed().as_secs_f64());
        let forest = successor_map(&field, &grid)?;
        t.push(clock.elapsed().as_secs_f64());
        let _dual = dual_successor_map(&forest);
        t.push(clock.elapsed().as_secs_f64());
        let _curve = peano_order(&forest);
        t.push(clock.elapsed().as_secs_f64());
        let mut prev = 0.0;
        Ok(t.into_iter()
            .map(|c| {
                let d = c - prev;
                prev = c;
                d
            })
            .collect::<Vec<f64>>())
    })?;
    let mut report = config.report(side as f64);
    let mut table = CsvTable::new("stages", &["stage", "mean_seconds", "cells_per_second"]);
    let cells = side as f64 * side as f64;
    for (k, name) in stages.iter().enumerate() {
        let mean = timings.iter().map(|t| t[k]).sum::<f64>() / timings.len() as f64;
        report.value(&format!("{name}_seconds"), mean);
        table.row(vec![name.to_string(), table::float(mean), table::float(cells / mean)]);
    }
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_names() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn validation_messages() {
        let base = ExperimentConfig::new(ExperimentKind::Busemann);
        assert!(base.validate().is_ok());
        assert!(base.clone().with_box(32).validate().is_err());
        assert!(base.clone().with_replicates(0).validate().is_err());
        assert!(base.clone().with_scale(10.0).validate().is_err());
        assert!(base.clone().with_param("bogus", 1).validate().is_err());
        let exp = ExperimentConfig::new(ExperimentKind::Exponents);
        assert!(exp.clone().with_scale(4096.0).validate().is_err());
        let mut big = exp.with_workers(16);
        big.storage = StorageMode::Materialized;
        let err = big.validate().unwrap_err().to_string();
        assert!(err.contains("on-demand"), "{err}");
        assert!(ExperimentConfig::new(ExperimentKind::Oracle).with_box(12).validate().is_err());
    }

    #[test]
    fn farm_preserves_order() {
        let v = farm(4, 50, |r| Ok(r * r)).unwrap();
        assert_eq!(v, (0..50).map(|r| r * r).collect::<Vec<_>>());
        assert!(farm(2, 5, |r| if r == 3 { Err(invalid("boom")) } else { Ok(r) }).is_err());
    }
}

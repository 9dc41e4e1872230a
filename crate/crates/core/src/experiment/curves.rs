//! Statistics of the Peano curve and of the sets it parametrizes.

use super::table::{float, int, CsvTable};
use super::{build_replicate, centered_frame, farm, ExperimentConfig, ExperimentOutput};
use crate::error::{invalid, Result};
use crate::field::CounterRng;
use crate::lattice::Vertex;
use crate::peano::boundary_rays;
use crate::render::{render_svg, RenderSpec};
use crate::report::{Check, StatReport};
use crate::rescale::{volume_to_index, RescaledFrame, RescaledPoint};
use crate::stats::sample::compensated_sum;
use crate::stats::{
    box_counts, box_counts_1d, displacement_profile, dyadic, even_grid, fit_exponent, holder_modulus,
    intrinsic_box_counts, mean_increment_rate, pullback_indices, target_cells, variation_sum, Coordinate,
    ExponentFit, FramedCurve, PullbackTarget,
};

const VARIATION_STREAM: u64 = 0x5641_5249;

/// Fewest replicates for which a fitted exponent is reported.
pub const MIN_FIT_REPLICATES: usize = 2;

/// Column-wise mean of per-replicate rows, summed in replicate order.
fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|k| compensated_sum(rows.iter().map(|r| r[k])) / rows.len() as f64)
        .collect()
}

fn fit_table(name: &str, scale_label: &str, fit: &ExponentFit) -> CsvTable {
    let mut t = CsvTable::new(name, &[scale_label, "mean"]);
    for (s, m) in fit.scales.iter().zip(&fit.means) {
        t.row(vec![float(*s), float(*m)]);
    }
    t
}

fn insufficient(mut report: StatReport, have: usize) -> ExperimentOutput {
    report.value("replicates_required", MIN_FIT_REPLICATES);
    report.fail(&format!("insufficient replicates: {have} < {MIN_FIT_REPLICATES}"));
    ExperimentOutput::new(report)
}

fn exp_range(config: &ExperimentConfig, lo_key: &str, hi_key: &str, lo: i32, hi: i32) -> Result<Vec<f64>> {
    let (a, b): (i32, i32) = (config.param(lo_key, lo)?, config.param(hi_key, hi)?);
    if b < a + 2 {
        return Err(invalid(format!("{lo_key}..{hi_key} must span at least 3 dyadic scales")));
    }
    Ok(dyadic(a..=b))
}

/// Mean displacement `|eta(a + v) - eta(a)|` per coordinate against dyadic
/// `v`, averaged over evenly spaced anchors `a` and over replicates.
pub(super) fn exponents(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = config.curve_scale();
    let v_grid = exp_range(config, "v_exp_min", "v_exp_max", 3, 13)?;
    let anchor_count: usize = config.param("anchors", 128)?;
    let window: f64 = config.param("anchor_window", 1.0)?;
    let report = config.report(n).param("v_grid", &v_grid).param("anchors", anchor_count).param("anchor_window", window);
    if config.replicates < MIN_FIT_REPLICATES {
        return Ok(insufficient(report, config.replicates));
    }
    let anchors = even_grid(-window, window, anchor_count);
    let frame = centered_frame(config.box_side, n)?;
    let rows = farm(config.workers, config.replicates, |r| {
        let rep = build_replicate(config.box_side, config.replicate_seed(r), config.storage, Some(frame.origin), false)?;
        let curve = rep.curve.expect("curve requested");
        let c = FramedCurve { frame: &frame, curve: &curve };
        Ok([
            displacement_profile(&c, &v_grid, &anchors, Coordinate::U)?,
            displacement_profile(&c, &v_grid, &anchors, Coordinate::H)?,
        ])
    })?;
    let mut report = report;
    let mut out_tables = Vec::new();
    for (k, (coord, target)) in [("u", 0.6), ("h", 0.4)].into_iter().enumerate() {
        let per_rep: Vec<Vec<f64>> = rows.iter().map(|r| r[k].clone()).collect();
        let means = column_means(&per_rep);
        let fit = fit_exponent(&v_grid.iter().copied().zip(means).collect::<Vec<_>>())?;
        report.check(Check::within(format!("slope_{coord}"), fit.slope, target - 0.05, target + 0.05));
        report.value(&format!("fit_{coord}"), &fit);
        out_tables.push(fit_table(&format!("profile_{coord}"), "v", &fit));
        if k == 0 {
            report.slope = Some(fit.slope);
            report.stderr = Some(fit.stderr);
        }
    }
    let mut out = ExperimentOutput::new(report);
    out.tables = out_tables;
    Ok(out)
}

/// Poisson-partition variation sums on `[-h, h]` for each rate and exponent,
/// and the increment rate estimate of the limiting constant.
pub(super) fn variation(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = config.curve_scale();
    let half: f64 = config.param("half_interval", 0.5)?;
    let rates: Vec<f64> = config.param_list("rates", &[100.0, 1000.0, 10000.0])?;
    let ehat_exp: i32 = config.param("ehat_exp", 7)?;
    let ehat_anchors: usize = config.param("ehat_anchors", 1024)?;
    if rates.len() < 2 || rates.windows(2).any(|w| w[0] >= w[1]) || rates[0] <= 0.0 {
        return Err(invalid("rates must be positive and increasing"));
    }
    let alphas = [4.0, 5.0, 6.0];
    let interval = (-half, half);
    let eps = 2f64.powi(-ehat_exp);
    let anchors = even_grid(-half, half - eps, ehat_anchors);
    let frame = centered_frame(config.box_side, n)?;
    let rows = farm(config.workers, config.replicates, |r| {
        let seed = config.replicate_seed(r);
        let rep = build_replicate(config.box_side, seed, config.storage, Some(frame.origin), false)?;
        let curve = rep.curve.expect("curve requested");
        let c = FramedCurve { frame: &frame, curve: &curve };
        let mut row = Vec::with_capacity(rates.len() * alphas.len() + 1);
        for (k, &m) in rates.iter().enumerate() {
            // Partition points come from their own stream, independent of the field.
            let sample_seed = CounterRng::new(seed.derive(VARIATION_STREAM + k as u64)).u64_at(0);
            for &alpha in &alphas {
                row.push(variation_sum(&c, interval, m, alpha, sample_seed)?.value);
            }
        }
        row.push(mean_increment_rate(&c, &anchors, eps, 5.0)?);
        Ok(row)
    })?;
    let means = column_means(&rows);
    let at = |k: usize, a: usize| means[k * alphas.len() + a];
    let ehat = means[rates.len() * alphas.len()];
    let length = 2.0 * half;

    let mut report = config
        .report(n)
        .param("interval", interval)
        .param("rates", &rates)
        .param("ehat_eps", eps)
        .param("ehat_anchors", ehat_anchors);
    let mut table = CsvTable::new("sums", &["rate", "alpha", "mean_sum"]);
    for (k, &m) in rates.iter().enumerate() {
        for (a, &alpha) in alphas.iter().enumerate() {
            table.row(vec![float(m), float(alpha), float(at(k, a))]);
        }
    }
    report.value("ehat", ehat);
    report.value("ehat_times_length", ehat * length);
    let five: Vec<f64> = (0..rates.len()).map(|k| at(k, 1)).collect();
    let spread = five.iter().cloned().fold(f64::MIN, f64::max) / five.iter().cloned().fold(f64::MAX, f64::min);
    let off_constant = five
        .iter()
        .map(|&v| (v / (ehat * length)).max(ehat * length / v))
        .fold(0.0, f64::max);
    let last = rates.len() - 1;
    report.check(Check::at_most("alpha5_spread_across_rates", spread, 1.5));
    report.check(Check::at_most("alpha5_factor_from_ehat_length", off_constant, 1.5));
    report.check(Check::at_least("alpha4_growth", at(last, 0) / at(0, 0), 3.0));
    report.check(Check::at_least("alpha6_shrink", at(0, 2) / at(last, 2), 3.0));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Largest intrinsic distance between curve points `delta` apart, over a
/// fixed set of evenly spaced pairs, averaged over replicates.
pub(super) fn holder(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = config.curve_scale();
    let half: f64 = config.param("half_window", 0.5)?;
    let deltas = exp_range(config, "delta_exp_min", "delta_exp_max", 6, 14)?;
    let pairs: usize = config.param("pairs", 64)?;
    let report = config.report(n).param("window", (-half, half)).param("deltas", &deltas).param("pairs", pairs);
    if config.replicates < MIN_FIT_REPLICATES {
        return Ok(insufficient(report, config.replicates));
    }
    let frame = centered_frame(config.box_side, n)?;
    let rows = farm(config.workers, config.replicates, |r| {
        let rep = build_replicate(config.box_side, config.replicate_seed(r), config.storage, Some(frame.origin), false)?;
        let curve = rep.curve.expect("curve requested");
        let c = FramedCurve { frame: &frame, curve: &curve };
        Ok(holder_modulus(&c, (-half, half), &deltas, pairs)?.means)
    })?;
    let fit = fit_exponent(&deltas.iter().copied().zip(column_means(&rows)).collect::<Vec<_>>())?;
    let mut report = report;
    report.slope = Some(fit.slope);
    report.stderr = Some(fit.stderr);
    report.check(Check::within("slope", fit.slope, 0.16, 0.22));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(fit_table("modulus", "delta", &fit));
    Ok(out)
}

/// Named pullback targets and their expected dimension bands.
fn pullback_targets(config: &ExperimentConfig) -> Result<Vec<(&'static str, PullbackTarget)>> {
    let half_width: f64 = config.param("half_width", 1.0)?;
    let half_time: f64 = config.param("half_time", 0.5)?;
    let geodesic_time: f64 = config.param("geodesic_time", 1.0)?;
    Ok(vec![
        ("horizontal", PullbackTarget::Horizontal { t0: 0.0, half_width }),
        ("vertical", PullbackTarget::Vertical { x0: 0.0, t_lo: -half_time, t_hi: half_time }),
        ("geodesic", PullbackTarget::Geodesic { t_hi: geodesic_time }),
    ])
}

/// Intrinsic box sizes for the targets: coarse enough that `delta^2` and
/// `delta^3` exceed the lattice spacing in `x` and `t`.
fn intrinsic_sizes(frame: &RescaledFrame) -> Vec<f64> {
    let x_step = 2.0 / frame.x_unit();
    let t_step = 1.0 / (2.0 * frame.n);
    let finest = x_step.sqrt().max(t_step.cbrt());
    let k_max = (-finest.log2()).floor() as i32;
    dyadic(k_max - 3..=k_max)
}

/// One-dimensional box counting of the volumes at which the curve visits a
/// line or a geodesic, with occupied counts averaged over replicates.
pub(super) fn pullback(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = config.curve_scale();
    let sizes = exp_range(config, "size_exp_min", "size_exp_max", 5, 13)?;
    let targets = pullback_targets(config)?;
    let report = config.report(n).param("box_sizes", &sizes).param("targets", targets.iter().map(|t| t.1).collect::<Vec<_>>());
    if config.replicates < MIN_FIT_REPLICATES {
        return Ok(insufficient(report, config.replicates));
    }
    let frame = centered_frame(config.box_side, n)?;
    let in_sizes = intrinsic_sizes(&frame);
    let rows = farm(config.workers, config.replicates, |r| {
        let rep = build_replicate(config.box_side, config.replicate_seed(r), config.storage, Some(frame.origin), false)?;
        let curve = rep.curve.expect("curve requested");
        targets
            .iter()
            .map(|&(_, target)| {
                let vols = pullback_indices(&frame, &curve, &rep.forest, target)?;
                let points: Vec<RescaledPoint> =
                    target_cells(&frame, &rep.forest, target).into_iter().map(|v| frame.to_rescaled(v)).collect();
                Ok((
                    box_counts_1d(&vols, &sizes).into_iter().map(|p| p.1).collect::<Vec<f64>>(),
                    intrinsic_box_counts(&points, &in_sizes).into_iter().map(|p| p.1).collect::<Vec<f64>>(),
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut report = report.param("intrinsic_box_sizes", &in_sizes);
    let mut table = CsvTable::new("counts", &["target", "inverse_size", "mean_count"]);
    let bands = [("horizontal", Some(0.32), 0.48), ("vertical", Some(0.52), 0.68), ("geodesic", None, 0.68)];
    for (k, (name, _)) in targets.iter().enumerate() {
        let counts = column_means(&rows.iter().map(|r| r[k].0.clone()).collect::<Vec<_>>());
        let in_counts = column_means(&rows.iter().map(|r| r[k].1.clone()).collect::<Vec<_>>());
        let inv: Vec<f64> = sizes.iter().map(|d| 1.0 / d).collect();
        let fit = fit_exponent(&inv.iter().copied().zip(counts.iter().copied()).collect::<Vec<_>>())?;
        let in_fit = fit_exponent(&in_sizes.iter().map(|d| 1.0 / d).zip(in_counts).collect::<Vec<_>>())?;
        for (s, c) in inv.iter().zip(&counts) {
            table.row(vec![name.to_string(), float(*s), float(*c)]);
        }
        let (_, lo, hi) = bands[k];
        report.check(match lo {
            Some(lo) => Check::within(format!("{name}_dimension"), fit.slope, lo, hi),
            None => Check::at_most(format!("{name}_dimension"), fit.slope, hi),
        });
        report.check(Check::at_least(format!("{name}_above_intrinsic_fifth"), fit.slope, in_fit.slope / 5.0 - 0.1));
        report.value(&format!("{name}_fit"), &fit);
        report.value(&format!("{name}_intrinsic_dimension"), in_fit.slope);
    }
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Euclidean box-counting dimension of the geodesic from the frame origin
/// and of the rays bounding a curve segment, in a window of the frame.
pub(super) fn fractal(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let n = config.scale.unwrap_or(side as f64 / 2.0);
    let sizes = exp_range(config, "size_exp_min", "size_exp_max", 4, 9)?;
    let segment: f64 = config.param("segment", 0.25)?;
    let window: f64 = config.param("window", 1.0)?;
    let frame = RescaledFrame::new(side, n, Vertex::new(side / 4, side / 4))?;
    let report = config.report(n).param("box_sizes", &sizes).param("segment", (-segment, segment)).param("window", window);
    if config.replicates < MIN_FIT_REPLICATES {
        return Ok(insufficient(report, config.replicates));
    }
    let in_window = |z: &RescaledPoint| z.x.abs() <= window && z.t.abs() <= window;
    let rows = farm(config.workers, config.replicates, |r| {
        let rep = build_replicate(side, config.replicate_seed(r), config.storage, Some(frame.origin), true)?;
        let (curve, dual) = (rep.curve.expect("curve requested"), rep.dual.expect("dual requested"));
        let top = (frame.origin.level() as f64 + 2.0 * n).min(rep.forest.lattice().max_level() as f64) as u32;
        let geodesic: Vec<RescaledPoint> = rep
            .forest
            .chain_until(frame.origin, top)
            .vertices()
            .iter()
            .map(|&v| frame.to_rescaled(v))
            .filter(in_window)
            .collect();
        let (k1, k2) = (volume_to_index(&frame, -segment), volume_to_index(&frame, segment));
        let cells = boundary_rays(&curve, &rep.forest, &dual, k1, k2)?;
        let bx = curve.lattice();
        let boundary: Vec<RescaledPoint> = bx
            .iter()
            .filter(|&v| cells[bx.id(v)])
            .map(|v| frame.to_rescaled(v))
            .filter(in_window)
            .collect();
        Ok([geodesic, boundary].map(|pts| box_counts(&pts, &sizes).into_iter().map(|p| p.1).collect::<Vec<f64>>()))
    })?;
    let mut report = report;
    let mut table = CsvTable::new("counts", &["set", "inverse_size", "mean_count"]);
    let inv: Vec<f64> = sizes.iter().map(|d| 1.0 / d).collect();
    for (k, name) in ["geodesic", "boundary"].into_iter().enumerate() {
        let counts = column_means(&rows.iter().map(|r| r[k].clone()).collect::<Vec<_>>());
        let fit = fit_exponent(&inv.iter().copied().zip(counts.iter().copied()).collect::<Vec<_>>())?;
        for (s, c) in inv.iter().zip(&counts) {
            table.row(vec![name.to_string(), float(*s), float(*c)]);
        }
        report.check(Check::within(format!("{name}_dimension"), fit.slope, 4.0 / 3.0 - 0.15, 4.0 / 3.0 + 0.15).soft());
        report.value(&format!("{name}_fit"), &fit);
    }
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Tree, dual and curve picture of replicate 0.
pub(super) fn render(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = config.curve_scale();
    let window: f64 = config.param("window", 1.0)?;
    let volume: f64 = config.param("volume", 0.1)?;
    let width: u32 = config.param("width", 800)?;
    let frame = centered_frame(config.box_side, n)?;
    let spec = RenderSpec {
        x_range: (-window, window),
        t_range: (-window / 2.0, window / 2.0),
        volume: Some((-volume, volume)),
        width,
    };
    spec.validate(&frame)?;
    let rep = build_replicate(config.box_side, config.replicate_seed(0), config.storage, Some(frame.origin), true)?;
    let (curve, dual) = (rep.curve.expect("curve requested"), rep.dual.expect("dual requested"));
    let (svg, stats) = render_svg(&frame, &rep.forest, &dual, &curve, &spec)?;
    let mut report = StatReport::new("render", n, config.seed, 1)
        .param("box", config.box_side)
        .param("spec", spec);
    report.value("tree_edges", stats.tree_edges);
    report.value("dual_edges", stats.dual_edges);
    report.value("curve_points", stats.curve_points);
    let mut table = CsvTable::new("elements", &["element", "count"]);
    table.row(vec!["tree_edges".into(), int(stats.tree_edges)]);
    table.row(vec!["dual_edges".into(), int(stats.dual_edges)]);
    table.row(vec!["curve_points".into(), int(stats.curve_points)]);
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    out.svg = Some(svg);
    Ok(out)
}

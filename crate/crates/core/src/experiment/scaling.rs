//! Lattice scaling laws: Busemann increments, passage-time growth,
//! transversal wandering and the volume to the right of a geodesic.

use super::table::{float, int, CsvTable};
use super::{farm, ExperimentConfig, ExperimentOutput};
use crate::error::{invalid, Result};
use crate::field::WeightField;
use crate::forest::{successor_map, volume_right_subtree};
use crate::lattice::Vertex;
use crate::lpp::{passage_time, value_grid_default};
use crate::report::Check;
use crate::stats::sample::{compensated_sum, mean, sorted, std_dev};
use crate::stats::{
    busemann_increments, fit_exponent, inclusive_busemann_increments, vr_tail, walk_stats, Convention, TailCurve,
};

/// Anti-diagonal increments through the middle of the box, pooled over
/// replicates. The acceptance law is the classical one, which counts both
/// endpoint weights; the first-vertex-excluded differences are checked
/// against their own exact variance.
pub(super) fn busemann(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let level: u32 = config.param("level", side)?;
    // Keep the window near the diagonal: far off it the increments see a
    // different direction to the root and their law changes.
    let half: u32 = config.param("half_window", (side / 8).min(250))?;
    let mid = level / 2;
    if half == 0 || half > mid {
        return Err(invalid(format!("half_window must be in [1, {mid}]")));
    }
    let range = (mid - half, mid + half - 1);
    let per_rep = farm(config.workers, config.replicates, |r| {
        let field = WeightField::new(side, config.replicate_seed(r), config.storage)?;
        let grid = value_grid_default(&field);
        Ok((
            inclusive_busemann_increments(&field, &grid, level, range)?,
            busemann_increments(&grid, level, range)?,
        ))
    })?;
    let (mut inc, mut exc) = (Vec::new(), Vec::new());
    for (a, b) in per_rep {
        inc.extend(a);
        exc.extend(b);
    }
    let inclusive = walk_stats(inc, Convention::IncludeFirst)?;
    let excluded = walk_stats(exc, Convention::ExcludeFirst)?;

    let mut report = config.report(side as f64).param("level", level).param("half_window", half);
    report.value("increments", inclusive.count);
    let mut table = CsvTable::new("walk", &["convention", "count", "mean", "variance", "exact_variance", "ks"]);
    for s in [&inclusive, &excluded] {
        table.row(vec![
            format!("{:?}", s.convention),
            int(s.count),
            float(s.mean),
            float(s.variance),
            float(s.convention.variance()),
            float(s.ks),
        ]);
    }
    report.value("inclusive", &inclusive);
    report.value("excluded", &excluded);
    report.check(Check::at_least("increment_count", inclusive.count as f64, 1e4));
    report.check(Check::within("mean", inclusive.mean, -0.1, 0.1));
    report.check(Check::within("variance", inclusive.variance, 7.2, 8.8));
    report.check(Check::at_most("ks_laplace", inclusive.ks, 0.05));
    report.check(Check::within("excluded_variance", excluded.variance, 5.4, 6.6));
    report.check(Check::at_most("excluded_ks", excluded.ks, 0.05));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// `T((0,0), (n,n))` on a field of side `n + 1`, for each scale.
pub(super) fn lln(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let scales: Vec<u32> = config.param_list("scales", &[250, 500, 1000, 2000])?;
    let mean_scale: u32 = config.param("mean_scale", 1000)?;
    if scales.len() < 3 || scales.iter().any(|&n| n < 2 || n >= config.box_side) {
        return Err(invalid(format!(
            "lln needs at least 3 scales in [2, {}) (below --box)",
            config.box_side
        )));
    }
    if !scales.contains(&mean_scale) {
        return Err(invalid("mean_scale must be one of the scales"));
    }
    let per_rep = farm(config.workers, config.replicates, |r| {
        scales
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let field = WeightField::new(n + 1, config.replicate_seed(r).derive(k as u64), config.storage)?;
                passage_time(&field, Vertex::new(0, 0), Vertex::new(n, n))
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut report = config.report(mean_scale as f64).param("scales", &scales);
    let mut table = CsvTable::new("scales", &["n", "mean_over_n", "std"]);
    let mut pairs = Vec::new();
    for (k, &n) in scales.iter().enumerate() {
        let sample: Vec<f64> = per_rep.iter().map(|t| t[k]).collect();
        let (m, s) = (mean(&sample) / n as f64, std_dev(&sample));
        table.row(vec![int(n), float(m), float(s)]);
        pairs.push((n as f64, s));
        if n == mean_scale {
            report.value("mean_over_n", m);
            report.check(Check::within("mean_over_n", m, 3.9, 4.0));
        }
    }
    let fit = fit_exponent(&pairs)?;
    report.slope = Some(fit.slope);
    report.stderr = Some(fit.stderr);
    report.check(Check::within("std_slope", fit.slope, 1.0 / 3.0 - 0.08, 1.0 / 3.0 + 0.08));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// `E sup |x|` of the geodesic from a fixed vertex over its first `2m`
/// levels, with `x = (i - j) / 2` relative to the start.
pub(super) fn transversal(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let side = config.box_side;
    let levels: Vec<u32> = config.param_list("levels", &[16, 32, 64, 128, 256, 512])?;
    let start = Vertex::new(side / 8, side / 8);
    let top = *levels.iter().max().unwrap_or(&0);
    if levels.len() < 3 || start.level() + 2 * top > side - 1 {
        return Err(invalid(format!(
            "transversal needs at least 3 levels m with 2m <= {}",
            (side - 1 - start.level()) / 2
        )));
    }
    let per_rep = farm(config.workers, config.replicates, |r| {
        let field = WeightField::new(side, config.replicate_seed(r), config.storage)?;
        let forest = successor_map(&field, &value_grid_default(&field))?;
        let chain = forest.chain_until(start, start.level() + 2 * top);
        let mut sup = 0i64;
        let mut at = Vec::with_capacity(levels.len());
        let mut sorted_levels = levels.clone();
        sorted_levels.sort_unstable();
        let mut next = 0;
        for v in chain.vertices() {
            sup = sup.max((v.x2() - start.x2()).abs());
            while next < sorted_levels.len() && v.level() == start.level() + 2 * sorted_levels[next] {
                at.push((sorted_levels[next], sup as f64 / 2.0));
                next += 1;
            }
        }
        Ok(at)
    })?;
    let mut report = config.report(top as f64).param("levels", &levels).param("start", start);
    let mut table = CsvTable::new("levels", &["m", "mean_sup_abs_x"]);
    let mut pairs = Vec::new();
    for (k, &(m, _)) in per_rep[0].iter().enumerate() {
        let e = compensated_sum(per_rep.iter().map(|a| a[k].1)) / per_rep.len() as f64;
        table.row(vec![int(m), float(e)]);
        pairs.push((m as f64, e));
    }
    let fit = fit_exponent(&pairs)?;
    report.slope = Some(fit.slope);
    report.stderr = Some(fit.stderr);
    report.check(Check::within("slope", fit.slope, 2.0 / 3.0 - 0.08, 2.0 / 3.0 + 0.08));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Thresholds of the lower-tail curve.
const VR_EPS: [f64; 7] = [0.01, 0.03, 0.05, 0.1, 0.2, 0.3, 0.5];

/// `V_R / n^{5/3}` for geodesics started at level `2n` of a box of side
/// `4n`, observed until level `4n`. Several well separated starting points
/// share one field.
pub(super) fn vr(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let scales: Vec<u32> = config.param_list("scales", &[256, 512])?;
    let bases: usize = config.param("bases", 4)?;
    let eps: Vec<f64> = config.param_list("eps", &VR_EPS)?;
    if scales.len() != 2 || scales[0] >= scales[1] || scales[0] < 16 {
        return Err(invalid("vr takes two increasing scales of at least 16"));
    }
    if bases == 0 || bases > 8 {
        return Err(invalid("bases must be in [1, 8]"));
    }
    for &e in &[0.03, 0.3] {
        if !eps.contains(&e) {
            return Err(invalid("eps grid must contain 0.03 and 0.3"));
        }
    }
    let mut samples_by_scale = Vec::new();
    let mut report = config.report(scales[1] as f64).param("scales", &scales).param("bases", bases);
    let mut table = CsvTable::new("tail", &["n", "eps", "probability"]);
    for (k, &n) in scales.iter().enumerate() {
        let side = 4 * n;
        let base_level = 2 * n;
        let horizon = base_level + 2 * n;
        let spacing = default_spacing(n, config)?;
        let offsets: Vec<i64> = (0..bases).map(|b| (2 * b as i64 - (bases as i64 - 1)) * spacing).collect();
        let max_offset = offsets.iter().map(|d| d.abs()).max().unwrap_or(0);
        if max_offset as u32 >= base_level {
            return Err(invalid("bases do not fit on the base level; lower spacing or bases"));
        }
        let norm = (n as f64).powf(5.0 / 3.0);
        let per_rep = farm(config.workers, config.replicates, |r| {
            let field = WeightField::new(side, config.replicate_seed(r).derive(k as u64), config.storage)?;
            let forest = successor_map(&field, &value_grid_default(&field))?;
            offsets
                .iter()
                .map(|&d| {
                    let (i, j) = ((base_level as i64 + d) / 2, (base_level as i64 - d) / 2);
                    let v = volume_right_subtree(&forest, Vertex::new(i as u32, j as u32), horizon)?;
                    Ok(v as f64 / norm)
                })
                .collect::<Result<Vec<f64>>>()
        })?;
        let samples: Vec<f64> = per_rep.into_iter().flatten().collect();
        let tail = vr_tail(&samples, &eps)?;
        for (e, p) in tail.thresholds.iter().zip(&tail.probabilities) {
            table.row(vec![int(n), float(*e), float(*p)]);
        }
        report.value(&format!("median_{n}"), crate::stats::sample::quantile(&sorted(samples.clone()), 0.5));
        report.value(&format!("tail_{n}"), &tail);
        report.check(Check::holds(format!("tail_monotone_{n}"), tail.is_monotone()));
        samples_by_scale.push((samples, tail));
    }
    let (small, large) = (&samples_by_scale[0], &samples_by_scale[1]);
    let ks = crate::stats::sample::ks_two_sample(&sorted(small.0.clone()), &sorted(large.0.clone()));
    report.check(Check::at_most("ks_between_scales", ks, 0.1));
    let drift = stabilization_gap(&small.1, &large.1);
    report.check(Check::at_most("tail_excess_large_over_small", drift, 0.05));
    let pooled: Vec<f64> = small.0.iter().chain(&large.0).copied().collect();
    let tail = vr_tail(&pooled, &eps)?;
    let (p_hi, p_lo) = (tail.at(0.3).unwrap_or(f64::NAN), tail.at(0.03).unwrap_or(f64::NAN));
    report.value("pooled_tail", &tail);
    report.check(Check::holds("pooled_tail_monotone", tail.is_monotone()));
    report.check(Check::at_least("pooled_p_0.3", p_hi, f64::MIN_POSITIVE));
    let ratio = if p_lo > 0.0 { p_hi / p_lo } else { f64::INFINITY };
    report.value("pooled_p_0.03", p_lo);
    report.check(Check::at_least("tail_drop_0.3_to_0.03", ratio, 5.0));
    let mut out = ExperimentOutput::new(report);
    out.tables.push(table);
    Ok(out)
}

/// Largest excess of the larger scale's tail over the smaller one on
/// `eps <= 0.3`.
fn stabilization_gap(small: &TailCurve, large: &TailCurve) -> f64 {
    small
        .thresholds
        .iter()
        .zip(small.probabilities.iter().zip(&large.probabilities))
        .filter(|(e, _)| **e <= 0.3)
        .map(|(_, (ps, pl))| pl - ps)
        .fold(0.0, f64::max)
}

/// Base spacing on the anti-diagonal, in units of `x2`: `1.5 (2n)^{2/3}`
/// rounded to an even number, so neighbouring geodesics rarely meet.
fn default_spacing(n: u32, config: &ExperimentConfig) -> Result<i64> {
    let s: f64 = config.param("spacing", 1.5 * (2.0 * n as f64).powf(2.0 / 3.0))?;
    let even = 2 * (s / 2.0).round() as i64;
    Ok(even.max(2))
}

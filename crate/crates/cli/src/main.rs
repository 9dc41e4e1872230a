//! `mtl`: generate replicates, run experiments, render pictures, aggregate
//! reports and time the pipeline.
//!
//! Exit codes: 0 when every acceptance check passes, 2 when a report fails
//! its checks, 1 on any error.

mod settings;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mtl_core::experiment::{build_replicate, run_experiment, ExperimentKind, ExperimentOutput};
use mtl_core::report::{fmt_float, StatReport};
use mtl_core::rescale::RescaledFrame;
use serde_json::json;

use settings::Common;

#[derive(Debug, Parser)]
#[command(name = "mtl", version, about = "Geodesic trees, dual trees and Peano curves of exponential last passage percolation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build one replicate and write its curve as a PEANO1 dump.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Replicate index within the base seed.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
    /// Run an experiment and write its JSON report and CSV tables.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Draw the tree, dual tree and a curve segment as SVG.
    Render {
        #[command(flatten)]
        common: Common,
    },
    /// Summarize report files as one CSV row per check.
    Aggregate {
        /// Report files written by `run`.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Write the table here instead of standard output.
        #[arg(long, env = "MTL_OUT", value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Time each stage of the replicate pipeline.
    Bench {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MTL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every check passed.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Gen { common, replicate } => generate(&common, replicate),
        Command::Run { common } => run(&common, None),
        Command::Render { common } => run(&common, Some(ExperimentKind::Render)),
        Command::Bench { common } => run(&common, Some(ExperimentKind::Bench)),
        Command::Aggregate { reports, out } => aggregate(&reports, out.as_deref()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn run(common: &Common, forced: Option<ExperimentKind>) -> Result<bool> {
    let resolved = common.resolve(forced)?;
    let config = &resolved.config;
    fs::create_dir_all(&resolved.out).with_context(|| format!("creating {}", resolved.out.display()))?;
    log::info!("running {} on a box of side {}", config.experiment, config.box_side);
    let output = run_experiment(config)?;
    write_outputs(&resolved.out, config.experiment, &output)?;
    print_summary(&output.report);
    Ok(output.report.pass)
}

fn write_outputs(dir: &Path, kind: ExperimentKind, output: &ExperimentOutput) -> Result<()> {
    let stem = kind.name();
    write_file(&dir.join(format!("{stem}.json")), output.report.to_json().as_bytes())?;
    for table in &output.tables {
        write_file(&dir.join(format!("{stem}_{}.csv", table.name)), table.to_csv().as_bytes())?;
    }
    if let Some(svg) = &output.svg {
        write_file(&dir.join(format!("{stem}.svg")), svg.as_bytes())?;
    }
    Ok(())
}

fn print_summary(report: &StatReport) {
    for c in &report.checks {
        let band = match (c.lo, c.hi) {
            (Some(lo), Some(hi)) => format!("[{lo}, {hi}]"),
            (Some(lo), None) => format!(">= {lo}"),
            (None, Some(hi)) => format!("<= {hi}"),
            (None, None) => String::new(),
        };
        let verdict = match (c.pass, c.soft) {
            (true, _) => "pass",
            (false, true) => "warn",
            (false, false) => "FAIL",
        };
        println!("{:<12} {:<36} {:>14.6} {:<24} {verdict}", report.estimator, c.name, c.value, band);
    }
    if let Some(reason) = report.values.get("failure") {
        println!("{:<12} failure: {}", report.estimator, reason);
    }
    println!("{:<12} {}", report.estimator, if report.pass { "PASS" } else { "FAIL" });
}

fn generate(common: &Common, replicate: u64) -> Result<bool> {
    // `gen` is not an experiment; resolve with a throwaway kind so the
    // shared settings (box, seed, out, storage) still apply.
    let resolved = common.resolve(Some(ExperimentKind::Render))?;
    let c = &resolved.config;
    if c.box_side < 2 {
        anyhow::bail!("--box must be at least 2");
    }
    let frame = RescaledFrame::standard(c.box_side);
    let seed = mtl_core::field::Seed::new(c.seed, replicate);
    let rep = build_replicate(c.box_side, seed, c.storage, Some(frame.origin), false)?;
    let curve = rep.curve.expect("curve requested");
    fs::create_dir_all(&resolved.out)?;
    let dump = resolved.out.join("curve.peano1");
    let file = fs::File::create(&dump).with_context(|| format!("creating {}", dump.display()))?;
    curve.write_dump(BufWriter::new(file)).with_context(|| format!("writing {}", dump.display()))?;
    let summary = json!({
        "box": c.box_side,
        "seed": { "base": c.seed, "replicate": replicate },
        "origin": frame.origin,
        "origin_index": curve.origin_index(),
        "cells": curve.len(),
        "dump": "curve.peano1",
    });
    write_file(&resolved.out.join("gen.json"), (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())?;
    println!("wrote {} ({} cells)", dump.display(), curve.len());
    Ok(true)
}

const AGGREGATE_HEADER: &str = "estimator,n,replicates,slope,check,value,lo,hi,soft,check_pass,report_pass";

fn aggregate(paths: &[PathBuf], out: Option<&Path>) -> Result<bool> {
    let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
    let mut csv = String::from(AGGREGATE_HEADER);
    csv.push('\n');
    let mut all_pass = true;
    for path in paths {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let report = StatReport::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
        all_pass &= report.pass;
        let prefix = format!(
            "{},{},{},{}",
            report.estimator,
            fmt_float(report.n),
            report.replicates,
            opt(report.slope)
        );
        if report.checks.is_empty() {
            csv.push_str(&format!("{prefix},,,,,,,{}\n", report.pass));
        }
        for c in &report.checks {
            csv.push_str(&format!(
                "{prefix},{},{},{},{},{},{},{}\n",
                c.name,
                fmt_float(c.value),
                opt(c.lo),
                opt(c.hi),
                c.soft,
                c.pass,
                report.pass
            ));
        }
    }
    match out {
        Some(p) => write_file(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    Ok(all_pass)
}

//! Layered settings: command-line flags, then `MTL_*` environment variables
//! (both handled by clap), then the INI config file, then experiment defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use ini::Ini;
use mtl_core::experiment::{ExperimentConfig, ExperimentKind};
use mtl_core::field::StorageMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Storage {
    OnDemand,
    Materialized,
}

impl Storage {
    fn parse(s: &str) -> Result<Self> {
        <Storage as ValueEnum>::from_str(s.trim(), true).map_err(|_| anyhow!("storage must be on-demand or materialized, got '{s}'"))
    }

    fn mode(self) -> StorageMode {
        match self {
            Storage::OnDemand => StorageMode::OnDemand,
            Storage::Materialized => StorageMode::Materialized,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Box side N (vertices per axis).
    #[arg(long = "box", env = "MTL_BOX", value_name = "N")]
    pub box_side: Option<u32>,
    /// Scale n of the rescaled frame.
    #[arg(long, env = "MTL_SCALE")]
    pub scale: Option<f64>,
    /// Base seed; replicate r uses the stream (seed, r).
    #[arg(long, env = "MTL_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "MTL_REPLICATES", value_name = "R")]
    pub replicates: Option<usize>,
    /// oracle, duality, peano, busemann, lln, transversal, exponents,
    /// variation, holder, pullback, fractal, vr, render or bench.
    #[arg(long, env = "MTL_EXPERIMENT")]
    pub experiment: Option<String>,
    /// Output directory.
    #[arg(long, env = "MTL_OUT", value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "MTL_WORKERS")]
    pub workers: Option<usize>,
    /// INI file of `key = value` settings; unknown keys are experiment
    /// parameters.
    #[arg(long, env = "MTL_CONFIG", value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Weight storage.
    #[arg(long, env = "MTL_STORAGE", value_enum)]
    pub storage: Option<Storage>,
    /// Memory cap for concurrently built replicates, in MiB.
    #[arg(long, env = "MTL_MEMORY_CAP_MIB", value_name = "MIB")]
    pub memory_cap_mib: Option<u64>,
    /// Experiment parameter, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Settings read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSettings {
    pub values: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
}

const FILE_KEYS: [&str; 9] = [
    "box",
    "scale",
    "seed",
    "replicates",
    "experiment",
    "out",
    "workers",
    "storage",
    "memory_cap_mib",
];

/// Reads a flat INI file. Keys outside any section, or in `[run]`, are
/// settings or parameters; keys in `[params]` are always parameters.
pub fn read_config(path: &Path) -> Result<FileSettings> {
    let ini = Ini::load_from_file(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut out = FileSettings::default();
    for (section, props) in ini.iter() {
        match section {
            None | Some("run") => {
                for (k, v) in props.iter() {
                    let k = k.trim().to_ascii_lowercase();
                    if FILE_KEYS.contains(&k.as_str()) {
                        out.values.insert(k, v.trim().to_string());
                    } else {
                        out.params.insert(k, v.trim().to_string());
                    }
                }
            }
            Some("params") => {
                for (k, v) in props.iter() {
                    out.params.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            Some(other) => bail!("config {}: unknown section [{other}]", path.display()),
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| anyhow!("config key {key}: cannot parse '{raw}'"))
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub out: PathBuf,
}

impl Common {
    /// Merges flags, environment and config file. `forced` pins the
    /// experiment for subcommands that run a fixed one.
    pub fn resolve(&self, forced: Option<ExperimentKind>) -> Result<Resolved> {
        let file = match &self.config {
            Some(p) => read_config(p)?,
            None => FileSettings::default(),
        };
        let fv = |k: &str| file.values.get(k).map(String::as_str);

        let named = match (&self.experiment, fv("experiment")) {
            (Some(e), _) => Some(e.clone()),
            (None, Some(e)) => Some(e.to_string()),
            (None, None) => None,
        };
        let kind = match (forced, named) {
            (Some(f), Some(n)) if n.parse::<ExperimentKind>()? != f => {
                bail!("this subcommand runs the {f} experiment, but '{n}' was requested")
            }
            (Some(f), _) => f,
            (None, Some(n)) => n.parse::<ExperimentKind>()?,
            (None, None) => bail!("no experiment given; pass --experiment, set MTL_EXPERIMENT or add `experiment = ...` to the config"),
        };

        let mut c = ExperimentConfig::new(kind);
        if let Some(v) = self.box_side.map(Ok).or_else(|| fv("box").map(|r| parse_value("box", r))) {
            c.box_side = v?;
        }
        if let Some(v) = self.scale.map(Ok).or_else(|| fv("scale").map(|r| parse_value("scale", r))) {
            c.scale = Some(v?);
        }
        if let Some(v) = self.seed.map(Ok).or_else(|| fv("seed").map(|r| parse_value("seed", r))) {
            c.seed = v?;
        }
        if let Some(v) = self.replicates.map(Ok).or_else(|| fv("replicates").map(|r| parse_value("replicates", r))) {
            c.replicates = v?;
        }
        if let Some(v) = self.workers.map(Ok).or_else(|| fv("workers").map(|r| parse_value("workers", r))) {
            c.workers = v?;
        }
        if let Some(v) = self.storage.map(Ok).or_else(|| fv("storage").map(Storage::parse)) {
            c.storage = v?.mode();
        }
        if let Some(v) = self
            .memory_cap_mib
            .map(Ok)
            .or_else(|| fv("memory_cap_mib").map(|r| parse_value("memory_cap_mib", r)))
        {
            c.memory_cap = v?.saturating_mul(1 << 20);
        }
        c.params = file.params.clone();
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--set expects KEY=VALUE, got '{kv}'"))?;
            c.params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let out = self
            .out
            .clone()
            .or_else(|| fv("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("mtl-out"));
        Ok(Resolved { config: c, out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn config_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn file_settings_fill_gaps_and_flags_win() {
        let f = config_file("experiment = busemann\nbox = 512\nseed = 9\nhalf_window = 100\n[params]\nlevel = 300\n");
        let common = Common { config: Some(f.path().into()), seed: Some(4), ..Common::default() };
        let r = common.resolve(None).unwrap();
        assert_eq!(r.config.experiment, ExperimentKind::Busemann);
        assert_eq!(r.config.box_side, 512);
        assert_eq!(r.config.seed, 4);
        assert_eq!(r.config.params.get("half_window").unwrap(), "100");
        assert_eq!(r.config.params.get("level").unwrap(), "300");
        assert_eq!(r.out, PathBuf::from("mtl-out"));
    }

    #[test]
    fn forced_experiment_conflicts_are_reported() {
        let common = Common { experiment: Some("oracle".into()), ..Common::default() };
        assert!(common.resolve(Some(ExperimentKind::Render)).is_err());
        assert!(Common::default().resolve(None).is_err());
        let bad = Common { set: vec!["novalue".into()], experiment: Some("oracle".into()), ..Common::default() };
        assert!(bad.resolve(None).is_err());
    }

    #[test]
    fn unknown_sections_and_bad_values_fail() {
        let f = config_file("[weird]\nx = 1\n");
        let common = Common { config: Some(f.path().into()), experiment: Some("oracle".into()), ..Common::default() };
        assert!(common.resolve(None).is_err());
        let g = config_file("experiment = oracle\nbox = seven\n");
        let common = Common { config: Some(g.path().into()), ..Common::default() };
        assert!(common.resolve(None).unwrap_err().to_string().contains("box"));
    }
}

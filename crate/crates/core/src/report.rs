//! JSON reports written by every experiment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "mtl-report/1";

/// One pinned acceptance check: `lo <= value <= hi`, a missing bound being
/// unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
    /// Report-only checks are shown but never fail the report.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub soft: bool,
}

impl Check {
    fn bounded(name: impl Into<String>, value: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = lo.is_none_or(|l| value >= l) && hi.is_none_or(|h| value <= h);
        Self {
            name: name.into(),
            value,
            lo,
            hi,
            pass: pass && !value.is_nan(),
            soft: false,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::bounded(name, value, Some(lo), Some(hi))
    }

    pub fn at_most(name: impl Into<String>, value: f64, hi: f64) -> Self {
        Self::bounded(name, value, None, Some(hi))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lo: f64) -> Self {
        Self::bounded(name, value, Some(lo), None)
    }

    /// A yes/no condition, stored as 1 or 0 that must equal 1.
    pub fn holds(name: impl Into<String>, condition: bool) -> Self {
        Self::within(name, if condition { 1.0 } else { 0.0 }, 1.0, 1.0)
    }

    pub fn soft(mut self) -> Self {
        self.soft = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub base: u64,
    pub replicates: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub schema: String,
    pub estimator: String,
    pub params: BTreeMap<String, Value>,
    pub n: f64,
    pub replicates: usize,
    pub seeds: SeedInfo,
    pub values: BTreeMap<String, Value>,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl StatReport {
    pub fn new(estimator: impl Into<String>, n: f64, base_seed: u64, replicates: usize) -> Self {
        Self {
            schema: SCHEMA_VERSION.to_string(),
            estimator: estimator.into(),
            params: BTreeMap::new(),
            n,
            replicates,
            seeds: SeedInfo { base: base_seed, replicates: (0..replicates as u64).collect() },
            values: BTreeMap::new(),
            slope: None,
            stderr: None,
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
        self
    }

    pub fn value(&mut self, key: &str, value: impl Serialize) {
        self.values.insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
        self.pass = self.checks.iter().all(|c| c.pass || c.soft);
    }

    /// Forces failure with a reason, e.g. a guard that refused to estimate.
    pub fn fail(&mut self, reason: &str) {
        self.value("failure", reason);
        self.pass = false;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        match raw.get("schema").and_then(Value::as_str) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Error::Format(format!("schema {other} does not match {SCHEMA_VERSION}")));
            }
            None => return Err(Error::Format("report has no schema field".into())),
        }
        serde_json::from_value(raw).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Fixed-width float for CSV output: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_schema_guard() {
        let mut r = StatReport::new("oracle", 8.0, 1, 3).param("box", 8);
        r.value("mismatches", 0);
        r.check(Check::at_most("max_abs_diff", 0.0, 1e-9));
        r.check(Check::within("soft", 5.0, 0.0, 1.0).soft());
        assert!(r.pass);
        let text = r.to_json();
        assert_eq!(StatReport::from_json(&text).unwrap(), r);
        let bad = text.replace(SCHEMA_VERSION, "mtl-report/0");
        assert!(StatReport::from_json(&bad).is_err());
        r.check(Check::at_least("hard", 0.0, 1.0));
        assert!(!r.pass);
    }

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 12345.678901234567, -2.5e-300] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}

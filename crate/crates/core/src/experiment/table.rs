//! Fixed-column CSV tables written next to each report.

use crate::report::fmt_float;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// File stem: the table is written as `<experiment>_<name>.csv`.
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len(), "row width of table {}", self.name);
        self.rows.push(cells);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn float(x: f64) -> String {
    fmt_float(x)
}

pub(crate) fn int(x: impl ToString) -> String {
    x.to_string()
}

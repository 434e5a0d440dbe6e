//! Run reports: a primary CSV table plus a versioned JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::LabError;

pub const SCHEMA: &str = "horolab-report/1";

/// Where a theoretical number comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// A constant stated by the theory.
    Paper,
    /// Computed here from an independent model (counts, simulations, exact sums).
    Derived,
    /// A tree analogue of a statement proved elsewhere.
    Extrapolated,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Paper => "paper",
            Provenance::Derived => "derived",
            Provenance::Extrapolated => "extrapolated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Target {
    pub name: String,
    pub value: f64,
    pub label: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// Some check failed or a verdict could not be reached.
    Inconclusive,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub targets: Vec<Target>,
    pub stats: Map<String, Value>,
    pub checks: Vec<Check>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub csv: Table,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: &RunConfig, csv: Table) -> Report {
        Report {
            csv,
            summary: Summary {
                schema: SCHEMA,
                version: env!("CARGO_PKG_VERSION"),
                config: config.clone(),
                targets: Vec::new(),
                stats: Map::new(),
                checks: Vec::new(),
                status: Status::Ok,
            },
        }
    }

    pub fn target(&mut self, name: &str, value: f64, label: Provenance) {
        self.summary.targets.push(Target { name: name.into(), value, label });
    }

    pub fn stat(&mut self, name: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("stat serializes");
        self.summary.stats.insert(name.into(), v);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        if !pass {
            self.summary.status = Status::Inconclusive;
        }
        self.summary.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.summary.checks.iter().find(|c| c.name == name)
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    /// Writes `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), LabError> {
        fs::create_dir_all(dir)?;
        let name = self.summary.config.experiment.name();
        let csv = dir.join(format!("{name}.csv"));
        let json = dir.join(format!("{name}.json"));
        fs::write(&csv, self.csv.to_bytes())?;
        fs::write(&json, self.json())?;
        Ok((csv, json))
    }
}

/// Shortest round-trip decimal, so the CSV is stable across runs.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 { s[n / 2] } else { (s[n / 2 - 1] + s[n / 2]) / 2.0 })
}

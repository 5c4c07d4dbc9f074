//! Report and CSV artifacts.
//!
//! Column schemas (version 1):
//! - `pmf`: `value,probability`
//! - predictor tables: `x,exact,predicted,ratio` (smoothness tables insert `u`
//!   after `x`)
//! - `dickman`: `u,rho`
//! - comparison tables: `stat,x,ks,tv,n_samples,seed`; empty cells mean the
//!   column does not apply (no TV against a continuous law, no seed for an
//!   exact scan)

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) if *v == 0.0 || (1e-4..1e16).contains(&v.abs()) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:e}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| c.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// A metric held against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Everything a run produced except timing, so equal configs give equal
/// bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: ExperimentConfig,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: config.command.name().to_string(),
            config: ExperimentConfig {
                output: None,
                junit: None,
                ..config.clone()
            },
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json`, one CSV per table and `timing.json` into `dir`.
    pub fn write_dir(&self, dir: &Path, seconds: f64) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        for t in &self.tables {
            let f = fs::File::create(dir.join(format!("{}.csv", t.name)))?;
            t.write_csv(std::io::BufWriter::new(f)).map_err(std::io::Error::other)?;
        }
        let timing = serde_json::json!({ "command": self.command, "seconds": seconds });
        fs::write(dir.join("timing.json"), format!("{timing}\n"))?;
        Ok(())
    }
}

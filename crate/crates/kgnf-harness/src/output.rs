//! CSV tables, plot data and run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

/// Named table with a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width of table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// Full precision (17 significant digits) in exponent notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_string(t: &Table) -> Result<String> {
    if t.rows.is_empty() {
        return Err(HarnessError::Config(format!("table {} is empty", t.name)));
    }
    let mut s = t.columns.join(",");
    s.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => format_number(*x),
                Cell::Text(x) => x.clone(),
                Cell::Empty => String::new(),
            })
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}

pub fn emit_csv(t: &Table, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(t)?)?;
    Ok(())
}

/// `(x, y, label)` triple of a plot series.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

pub fn emit_plot_data(points: &[PlotPoint], path: &Path) -> Result<()> {
    if points.is_empty() {
        return Err(HarnessError::Config("plot series is empty".into()));
    }
    let mut s = String::from("x,y,label\n");
    for p in points {
        writeln!(
            s,
            "{},{},{}",
            format_number(p.x),
            format_number(p.y),
            p.label
        )
        .expect("write to string");
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub config_sha256: String,
    pub config: String,
    /// Workspace version shared by `kgnf` and the harness.
    pub version: String,
    pub files: Vec<String>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest(experiment: &str, cfg: &ExperimentConfig, files: Vec<String>) -> Manifest {
    Manifest {
        experiment: experiment.to_string(),
        seed: cfg.seed,
        config_sha256: config_hash(cfg),
        config: cfg.to_toml_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        files,
    }
}

pub fn write_manifest(m: &Manifest, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

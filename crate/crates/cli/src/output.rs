//! Tables, provenance and PASS/FAIL summaries.
//!
//! Floats are written in the shortest form that round-trips, so parsing
//! a CSV cell gives back the exact `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Provenance recorded with every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    /// `config` is hashed through its canonical JSON form.
    pub fn new(command: &str, config: &impl Serialize, seed: u64) -> Self {
        let canonical = serde_json::to_string(config).expect("config serializes");
        let digest = Sha256::digest(format!("{command}\n{canonical}\n{seed}").as_bytes());
        Self {
            tool: "curvature",
            version: VERSION,
            command: command.to_string(),
            config_hash: hex::encode(digest),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
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

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(if x { "PASS" } else { "FAIL" }.into())
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    Value::Object(
                        self.headers.iter().cloned().zip(row.iter().map(Cell::json)).collect(),
                    )
                })
                .collect(),
        )
    }
}

/// One certificate verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            format!("{verdict} {}", self.name)
        } else {
            format!("{verdict} {}: {}", self.name, self.detail)
        }
    }
}

/// Writes artifacts under one output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    dir: PathBuf,
    format: Format,
    meta: Meta,
}

impl Artifacts {
    pub fn create(dir: &Path, format: Format, meta: Meta) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), format, meta })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    fn write(&self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// `<name>.csv` plus a `<name>.meta.json` sidecar, or a single `<name>.json`.
    pub fn table(&self, name: &str, table: &Table) -> Result<PathBuf> {
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.headers)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(Cell::text))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::io(&self.dir, e.into_error()))?;
                self.json(&format!("{name}.meta"), &json!({}))?;
                self.write(&format!("{name}.csv"), &bytes)
            }
            Format::Json => self.json(name, &json!({ "rows": table.to_json() })),
        }
    }

    /// `<name>.json` with the provenance under `"meta"`.
    pub fn json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        let mut doc = json!({ "meta": self.meta });
        if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, value) {
            for (k, v) in extra {
                doc.insert(k.clone(), v.clone());
            }
        } else {
            doc["value"] = value.clone();
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("json serializes");
        text.push('\n');
        self.write(&format!("{name}.json"), text.as_bytes())
    }

    pub fn summary(&self, checks: &[Check]) -> Result<PathBuf> {
        self.json("summary", &json!({ "checks": checks, "pass": checks.iter().all(|c| c.pass) }))
    }
}

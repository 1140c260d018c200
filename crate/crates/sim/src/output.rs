//! CSV and JSON rendering of command results.
//!
//! Both formats carry the same header: build and RNG identifiers, the seed,
//! every resolved configuration key and any warnings. In CSV these are
//! `#`-prefixed lines ahead of the column header; floats are written with 17
//! significant digits.

use dyson_core::mcmc::RNG_ALGORITHM;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_NAME"), "/", env!("CARGO_PKG_VERSION"));

const CONFIG_PREFIX: &str = "# [config] ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    /// Extra `key = value` metadata, e.g. which estimator produced the rows.
    pub meta: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Set when a contract or invariant check failed.
    pub failed: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn seed(&self) -> String {
        self.config.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# dyson-sim output\n");
        out.push_str(&format!("# [meta] build = {BUILD_ID}\n"));
        out.push_str(&format!("# [meta] rng = {RNG_ALGORITHM}\n"));
        out.push_str(&format!("# [meta] seed = {}\n", self.seed()));
        for (k, v) in &self.meta {
            out.push_str(&format!("# [meta] {k} = {v}\n"));
        }
        for line in self.config.emit().lines() {
            out.push_str(CONFIG_PREFIX);
            out.push_str(line);
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("# [warning] {w}\n"));
        }
        out.push_str(&self.data_csv());
        out
    }

    /// Column header and rows only.
    pub fn data_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        meta.insert("build".into(), json!(BUILD_ID));
        meta.insert("rng".into(), json!(RNG_ALGORITHM));
        meta.insert("seed".into(), json!(self.seed()));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), json!(v));
        }
        let config: Map<String, Value> = self
            .config
            .emit()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let doc = json!({
            "meta": meta,
            "config": config,
            "warnings": self.warnings,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }
}

/// The configuration text echoed in a CSV output header.
pub fn extract_config(output: &str) -> String {
    output.lines().filter_map(|l| l.strip_prefix(CONFIG_PREFIX)).fold(String::new(), |mut acc, l| {
        acc.push_str(l);
        acc.push('\n');
        acc
    })
}

/// Everything after the `#` header block.
pub fn data_section(output: &str) -> String {
    output.lines().filter(|l| !l.starts_with('#')).fold(String::new(), |mut acc, l| {
        acc.push_str(l);
        acc.push('\n');
        acc
    })
}

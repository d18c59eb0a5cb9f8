//! Experiment records and their CSV / JSON renderings.
//!
//! A CSV file starts with `# key: value` lines carrying the record (values
//! JSON-encoded), followed by a header row and one line per table row.
//! Wall-clock time is left out of the CSV so that re-running an experiment
//! reproduces the file byte for byte; the JSON rendering includes it.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{invalid, Error, Result};
use crate::experiments::Gate;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub parameters: Value,
    /// Grid descriptions with their exactness certificates.
    pub grid: Value,
    pub seed: Option<u64>,
    /// Summary values; the table rows are stored separately.
    pub outputs: Value,
    pub gates: Vec<Gate>,
    pub wall_clock_seconds: f64,
    pub version: String,
}

/// A record together with its table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub record: ExperimentRecord,
    pub rows: Vec<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(invalid(
                "format",
                format!("expected csv or json, got {other:?}"),
            )),
        }
    }
}

/// Collects the pieces of a [`Report`] while an experiment runs.
pub struct ReportBuilder {
    name: String,
    started: Instant,
    parameters: Value,
    grid: Value,
    seed: Option<u64>,
    outputs: Map<String, Value>,
    gates: Vec<Gate>,
    rows: Vec<Value>,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>, parameters: impl Serialize) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            started: Instant::now(),
            parameters: serde_json::to_value(parameters)?,
            grid: Value::Null,
            seed: None,
            outputs: Map::new(),
            gates: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn grid(&mut self, grid: impl Serialize) -> Result<()> {
        self.grid = serde_json::to_value(grid)?;
        Ok(())
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.outputs
            .insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn gate(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn rows<R: Serialize>(&mut self, rows: &[R]) -> Result<()> {
        for r in rows {
            self.rows.push(serde_json::to_value(r)?);
        }
        Ok(())
    }

    pub fn finish(self) -> Report {
        Report {
            record: ExperimentRecord {
                name: self.name,
                parameters: self.parameters,
                grid: self.grid,
                seed: self.seed,
                outputs: Value::Object(self.outputs),
                gates: self.gates,
                wall_clock_seconds: self.started.elapsed().as_secs_f64(),
                version: VERSION.to_string(),
            },
            rows: self.rows,
        }
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.record.gates.iter().all(|g| g.passed)
    }

    pub fn failed_gates(&self) -> impl Iterator<Item = &Gate> {
        self.record.gates.iter().filter(|g| !g.passed)
    }

    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let r = &self.record;
        let mut out = Vec::new();
        let mut meta = |key: &str, value: &Value| -> Result<()> {
            writeln!(out, "# {key}: {}", serde_json::to_string(value)?)?;
            Ok(())
        };
        meta("experiment", &Value::String(r.name.clone()))?;
        meta("version", &Value::String(r.version.clone()))?;
        meta("seed", &serde_json::to_value(r.seed)?)?;
        meta("parameters", &r.parameters)?;
        meta("grid", &r.grid)?;
        meta("outputs", &r.outputs)?;
        for g in &r.gates {
            meta("gate", &serde_json::to_value(g)?)?;
        }
        let columns = columns(&self.rows);
        let mut w = csv::WriterBuilder::new().from_writer(out);
        if !columns.is_empty() {
            w.write_record(&columns)?;
            for row in &self.rows {
                let cells: Vec<String> = columns
                    .iter()
                    .map(|c| row.get(c).map(cell).unwrap_or_default())
                    .collect();
                w.write_record(&cells)?;
            }
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Writes the rendering to `path` through a temporary file in the same
    /// directory, so readers never see a partial file.
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        write_atomic(path, &self.render(format)?)
    }
}

/// Column names in first-seen order over all rows.
fn columns(rows: &[Value]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for row in rows {
        if let Value::Object(map) = row {
            for key in map.keys() {
                if !out.iter().any(|c| c == key) {
                    out.push(key.clone());
                }
            }
        }
    }
    out
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| invalid("out", format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

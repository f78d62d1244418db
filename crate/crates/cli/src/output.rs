//! CSV tables and the JSON run manifest written beside them.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::CliError;

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
}

impl Cell {
    fn render(&self) -> String {
        match *self {
            Cell::Real(x) => fmt_f64(x),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

/// A numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write + ?Sized>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ASCII")
    }
}

/// Inputs echoed into the manifest, kept sorted by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs(Map<String, Value>);

impl Inputs {
    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

/// `results.csv` → `results.manifest.json`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn manifest(command: &str, inputs: Inputs, seed: Option<u64>, csv: &Path) -> Value {
    let mut m = Map::new();
    m.insert("artifact".into(), env!("CARGO_PKG_NAME").into());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("command".into(), command.into());
    m.insert("inputs".into(), inputs.into_value());
    m.insert("seed".into(), seed.map_or(Value::Null, Value::from));
    m.insert("angle_unit".into(), "radians".into());
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned());
    m.insert("csv".into(), name.map_or(Value::Null, Value::from));
    Value::Object(m)
}

/// Writes the table to `path` and the manifest beside it.
pub fn write_csv_with_manifest(path: &Path, table: &Table, manifest: &Value) -> Result<PathBuf, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", p.display()));
    std::fs::write(path, table.to_csv_string()).map_err(|e| io(path, e))?;
    let mpath = manifest_path(path);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&mpath, text).map_err(|e| io(&mpath, e))?;
    Ok(mpath)
}

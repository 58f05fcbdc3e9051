//! Tabular output shared by every subcommand.
//!
//! CSV layout: `# key: value` metadata lines, a header row, then data rows.
//! Floats are written in Rust's shortest round-trip form, so parsing a cell
//! back yields the identical `f64`.

use std::fmt;
use std::io::Write;

use serde_json::{json, Map, Value};

use crate::CliError;

/// Bumped whenever any column set changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Metadata key that varies between runs and is excluded from reproducibility checks.
pub const TIMESTAMP_KEY: &str = "generated_unix";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Inverse of the CSV encoding.
    pub fn parse(raw: &str) -> Cell {
        if raw.is_empty() {
            return Cell::Empty;
        }
        if let Ok(v) = raw.parse::<i64>() {
            return Cell::Int(v);
        }
        // Float cells always carry a '.', an exponent, or a non-finite name.
        match raw.parse::<f64>() {
            Ok(v) if raw.contains(['.', 'e', 'N', 'i']) => Cell::Float(v),
            _ => Cell::Text(raw.to_string()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(format!("{v:?}")),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }

    /// Bit-level equality, so `NaN` cells compare equal to themselves.
    pub fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => write!(f, "{v:?}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(i64::try_from(v).expect("table index fits in i64"))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub schema_version: u32,
    /// Canonical form of the invocation, without execution-only flags.
    pub command: String,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the schema");
        self.rows.push(row);
    }

    pub fn stamp(&mut self) {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.meta(TIMESTAMP_KEY, secs);
    }

    pub fn write_csv(&self, out: &mut impl Write) -> Result<(), CliError> {
        writeln!(out, "# schema_version: {}", self.schema_version)?;
        writeln!(out, "# command: {}", self.command)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut schema_version = None;
        let mut command = None;
        let mut metadata = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (k, v) = meta
                        .split_once(": ")
                        .ok_or_else(|| CliError::Parse(format!("bad metadata line {line:?}")))?;
                    match k {
                        "schema_version" => {
                            schema_version = Some(v.parse().map_err(|_| CliError::Parse(v.into()))?)
                        }
                        "command" => command = Some(v.to_string()),
                        _ => metadata.push((k.to_string(), v.to_string())),
                    }
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Self {
            schema_version: schema_version
                .ok_or_else(|| CliError::Parse("missing schema_version".into()))?,
            command: command.ok_or_else(|| CliError::Parse("missing command".into()))?,
            metadata,
            columns,
            rows,
        })
    }

    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> =
            self.metadata.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "schema_version": self.schema_version,
            "command": self.command,
            "metadata": metadata,
            "columns": self.columns,
            "rows": rows,
        })
    }

    pub fn write_json(&self, out: &mut impl Write) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> OutputRecord {
        let mut r = OutputRecord::new("eval --function x", &["q", "value", "note", "blank"]);
        r.meta("prime_cutoff", 1000);
        r.push(vec![1u64.into(), 0.1.into(), "a,b".into(), Cell::Empty]);
        r.push(vec![2u64.into(), 12.0.into(), "mean_value".into(), 3.5e-17.into()]);
        r.push(vec![3u64.into(), f64::NAN.into(), "".into(), (-1i64).into()]);
        r
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let back = OutputRecord::from_csv(&r.to_csv_string()).unwrap();
        assert_eq!(back.columns, r.columns);
        assert_eq!(back.metadata, r.metadata);
        assert_eq!(back.command, r.command);
        for (a, b) in back.rows.iter().zip(&r.rows) {
            for (x, y) in a.iter().zip(b) {
                let y = if *y == Cell::Text(String::new()) { Cell::Empty } else { y.clone() };
                assert!(x.same(&y), "{x:?} vs {y:?}");
            }
        }
    }

    #[test]
    fn float_cells_keep_their_type() {
        assert_eq!(Cell::parse("12.0"), Cell::Float(12.0));
        assert_eq!(Cell::parse("12"), Cell::Int(12));
        assert_eq!(Cell::parse("1e-10"), Cell::Float(1e-10));
        assert_eq!(Cell::parse("bracketed"), Cell::Text("bracketed".into()));
        assert_eq!(Cell::Float(0.1 + 0.2).to_string(), "0.30000000000000004");
    }

    #[test]
    fn json_mirrors_columns() {
        let v = sample().to_json();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["rows"][1]["value"], 12.0);
        assert_eq!(v["rows"][0]["blank"], Value::Null);
        assert_eq!(v["metadata"]["prime_cutoff"], "1000");
    }
}

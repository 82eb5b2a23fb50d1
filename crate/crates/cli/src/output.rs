use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

pub const SCHEMA: &str = "dc-rates/1";

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inputs; exit code 1.
    Usage(String),
    /// A certificate or slack check failed; exit code 2.
    Verification(String),
}

impl From<dcrates::Error> for Failure {
    fn from(e: dcrates::Error) -> Self {
        match e {
            dcrates::Error::Decomposition(_) | dcrates::Error::Weight { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Display form of a float that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// What a command produced.
pub struct Report {
    pub command: &'static str,
    pub body: Map<String, Value>,
    pub table: Table,
    /// Printed to stderr ahead of the output.
    pub banner: Option<String>,
    /// Set when the report itself records a failed verification.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(command: &'static str, table: Table) -> Self {
        Self { command, body: Map::new(), table, banner: None, failure: None }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.body.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
        self
    }

    /// Copies the fields of a serialized struct into the body.
    pub fn extend(&mut self, v: impl Serialize) -> &mut Self {
        if let Value::Object(m) = serde_json::to_value(v).expect("serializable") {
            self.body.extend(m);
        }
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let mut m = Map::new();
                m.insert("schema".into(), Value::from(SCHEMA));
                m.insert("command".into(), Value::from(self.command));
                m.extend(self.body.clone());
                serde_json::to_writer_pretty(&mut *out, &Value::Object(m))?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.table.header)?;
                for r in &self.table.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
        }
    }
}

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::{CliError, Format};

/// Bumped whenever a column or field changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// A table of results with an optional block of run-level metadata.
#[derive(Debug, Clone)]
pub struct Records {
    pub kind: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub meta: Option<Value>,
}

impl Records {
    pub fn new(kind: &'static str, columns: &[&'static str]) -> Self {
        Self {
            kind,
            columns: columns.to_vec(),
            rows: Vec::new(),
            meta: None,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "records": records,
        });
        if let Some(meta) = &self.meta {
            doc["meta"] = meta.clone();
        }
        doc
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        let err = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Output(format!("{other:?}")),
        };
        out.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            out.write_record(row.iter().map(csv_cell)).map_err(err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut w, &self.to_json()).map_err(|e| {
            if e.is_io() {
                CliError::Io(e.into())
            } else {
                CliError::Output(e.to_string())
            }
        })?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        match out {
            Some(path) => {
                let file = io::BufWriter::new(File::create(path)?);
                self.write_to(format, file)
            }
            None => self.write_to(format, io::stdout().lock()),
        }
    }

    fn write_to<W: Write>(&self, format: Format, w: W) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }
}

/// 17 significant digits for floats, plain integers, empty for null.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

/// A JSON number, or null when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

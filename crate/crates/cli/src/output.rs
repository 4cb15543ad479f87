use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;
use subspace_lab::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A finished report. CSV output has one line per entry of the `rows` array, each prefixed with
/// the scalar fields of the report.
pub struct Report {
    pub json: Value,
    pub rows: &'static str,
    pub status: u8,
}

impl Report {
    pub fn new(json: Value, rows: &'static str) -> Report {
        Report { json, rows, status: 0 }
    }

    pub fn with_status(mut self, status: u8) -> Report {
        self.status = status;
        self
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let bytes = match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Internal(e.to_string()))?;
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => self.csv()?,
        };
        let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write report: {e}"));
        match out {
            Some(p) => std::fs::write(p, bytes).map_err(io),
            None => std::io::stdout().lock().write_all(&bytes).map_err(io),
        }
    }

    fn csv(&self) -> Result<Vec<u8>> {
        let top = self.json.as_object().ok_or_else(|| Error::Internal("report is not an object".into()))?;
        let meta: Vec<(&String, String)> = top.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).map(|(k, v)| (k, cell(v))).collect();
        let rows: &[Value] = top.get(self.rows).and_then(Value::as_array).map_or(&[], |v| v.as_slice());
        let mut columns: Vec<String> = meta.iter().map(|(k, _)| k.to_string()).collect();
        if let Some(first) = rows.first().and_then(Value::as_object) {
            columns.extend(first.keys().cloned());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record(&columns).map_err(err)?;
        for row in rows {
            let mut record: Vec<String> = meta.iter().map(|(_, v)| v.clone()).collect();
            match row.as_object() {
                Some(o) => record.extend(o.values().map(cell)),
                None => record.push(cell(row)),
            }
            w.write_record(&record).map_err(err)?;
        }
        w.into_inner().map_err(|e| Error::Internal(e.to_string()))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

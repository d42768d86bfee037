//! Tabular results with a parameter echo in front, as CSV or JSON lines.

use serde_json::{Map, Value};

use crate::config::OutputFormat;
use crate::error::CliError;

pub struct Table {
    /// Resolved run parameters, in echo order.
    pub params: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            params: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> Result<Vec<u8>, CliError> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => Ok(self.to_json_lines()),
        }
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for (k, v) in &self.params {
            out.extend_from_slice(format!("# {k}={}\n", cell(v)).as_bytes());
        }
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| CliError::other(e.to_string());
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).map_err(fail)?;
        }
        w.into_inner().map_err(|e| CliError::other(e.to_string()))
    }

    fn to_json_lines(&self) -> Vec<u8> {
        let params: Map<String, Value> = self.params.iter().cloned().collect();
        let mut out = serde_json::json!({ "params": params }).to_string();
        out.push('\n');
        for row in &self.rows {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .cloned()
                .zip(row.iter().cloned())
                .collect();
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out.into_bytes()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

//! Report assembly and the three output encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Value};

use super::OutputFormat;

/// Everything a subcommand reports. Keyed sections are sorted by key.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub diagnostics: BTreeMap<String, Value>,
    /// Per-rung (or per-horizon) table; empty for scalar commands.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

pub(crate) fn num(x: f64) -> Value {
    Value::from(x)
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.insert(key.to_string(), value.into());
        self
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> Value {
        // Keys are inserted in sorted order so the output is stable whatever
        // map representation serde_json was built with.
        fn object(map: &BTreeMap<String, Value>) -> Value {
            Value::Object(map.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
        }
        let mut top = BTreeMap::new();
        top.insert("command".to_string(), Value::from(self.command.clone()));
        top.insert("diagnostics".to_string(), object(&self.diagnostics));
        top.insert("inputs".to_string(), object(&self.inputs));
        top.insert("results".to_string(), object(&self.results));
        if !self.rows.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|row| {
                    let sorted: BTreeMap<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().cloned())
                        .collect();
                    object(&sorted)
                })
                .collect();
            top.insert("rows".to_string(), Value::Array(rows));
        }
        let map: Map<String, Value> = top.into_iter().collect();
        Value::Object(map)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        }
    }

    /// Header plus one line per table row, each carrying the scalar results
    /// too; scalar commands give a single line.
    fn to_csv(&self) -> String {
        let mut header: Vec<String> = self.columns.clone();
        header.extend(self.results.keys().cloned());
        let scalars: Vec<String> = self.results.values().map(csv_cell).collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        if self.rows.is_empty() {
            w.write_record(&scalars).expect("in-memory write");
        }
        for row in &self.rows {
            let record: Vec<String> = row
                .iter()
                .map(csv_cell)
                .chain(scalars.iter().cloned())
                .collect();
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (title, section) in [
            ("inputs", &self.inputs),
            ("results", &self.results),
            ("diagnostics", &self.diagnostics),
        ] {
            if section.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{title}:");
            for (k, v) in section {
                let _ = writeln!(out, "  {k}: {}", text_cell(v));
            }
        }
        if !self.rows.is_empty() {
            let _ = writeln!(out, "rows:");
            let _ = writeln!(out, "  {}", self.columns.join("  "));
            for row in &self.rows {
                let cells: Vec<String> = row.iter().map(text_cell).collect();
                let _ = writeln!(out, "  {}", cells.join("  "));
            }
        }
        out
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.12}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => v.to_string(),
    }
}

fn text_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(text_cell).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

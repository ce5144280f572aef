//! Rendering of JSON reports as JSON, CSV or indented text.

use std::fmt::Write;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// A report plus an optional preferred table for CSV output.
pub struct Rendered {
    pub value: Value,
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Rendered {
    pub fn new(value: Value) -> Self {
        Rendered { value, table: None }
    }

    pub fn with_table(mut self, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => match &self.table {
                Some((header, rows)) => csv(header, rows),
                None => {
                    let mut rows = Vec::new();
                    flatten("", &self.value, &mut rows);
                    csv(&["key".to_string(), "value".to_string()], &rows)
                }
            },
            Format::Human => {
                let mut out = String::new();
                human(&self.value, 0, &mut out);
                out
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let line = |fields: &[String]| fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(",");
    out.push_str(&line(header));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Leaf values keyed by their dotted path.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&join(k), child, rows);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), child, rows);
            }
        }
        leaf => rows.push(vec![prefix.to_string(), scalar(leaf)]),
    }
}

fn is_leaf_array(items: &[Value]) -> bool {
    items.iter().all(|v| !v.is_object() && !v.is_array())
}

fn human(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                match child {
                    Value::Object(m) if !m.is_empty() => {
                        let _ = writeln!(out, "{pad}{k}:");
                        human(child, depth + 1, out);
                    }
                    Value::Array(items) if !items.is_empty() && !is_leaf_array(items) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for (i, item) in items.iter().enumerate() {
                            let _ = writeln!(out, "{pad}  [{i}]");
                            human(item, depth + 2, out);
                        }
                    }
                    Value::Array(items) => {
                        let joined: Vec<String> = items.iter().map(scalar).collect();
                        let _ = writeln!(out, "{pad}{k}: [{}]", joined.join(", "));
                    }
                    leaf => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(leaf));
                    }
                }
            }
        }
        leaf => {
            let _ = writeln!(out, "{pad}{}", scalar(leaf));
        }
    }
}

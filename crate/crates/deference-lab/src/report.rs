//! Reports rendered as JSON or as aligned text.

use std::fmt::Write;
use std::time::Duration;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// An ordered tree of named sections. Keys keep insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    root: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(mut self, name: &str, value: Value) -> Self {
        self.root.insert(name.to_owned(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.root.get(name)
    }

    pub fn as_value(&self) -> Value {
        Value::Object(self.root.clone())
    }

    /// Pretty JSON with a trailing newline. Contains nothing time-dependent.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.root).expect("report serializes");
        out.push('\n');
        out
    }

    /// `key.path  value` lines, keys padded to a common width.
    pub fn to_text(&self, elapsed: Option<Duration>) -> String {
        let mut rows = Vec::new();
        for (k, v) in &self.root {
            flatten(k, v, &mut rows);
        }
        if let Some(t) = elapsed {
            rows.push(("elapsed".to_owned(), format!("{:.3}s", t.as_secs_f64())));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            writeln!(out, "{k:<width$}  {v}").unwrap();
        }
        out
    }

    pub fn render(&self, format: Format, elapsed: Option<Duration>) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(elapsed),
        }
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&format!("{prefix}.{k}"), child, rows);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), child, rows);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            rows.push((prefix.to_owned(), format!("[{}]", parts.join(", "))));
        }
        _ => rows.push((prefix.to_owned(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_owned(),
        other => other.to_string(),
    }
}

//! Output documents: one JSON document on stdout, or CSV rows in a file.
//!
//! JSON schema:
//!
//! ```text
//! { "tool": "cwx", "version": "...", "command": "...",
//!   "config": { resolved settings },
//!   "passed": bool | null,          // verification commands only
//!   "results": [ record, ... ] }
//! ```
//!
//! CSV: one row per record, columns `tool`, `version`, `command`, then the
//! record flattened with dotted keys in sorted order, then `config.*`.
//! Nested arrays are written as JSON strings. Non-finite numbers are `null`
//! in JSON and empty in CSV.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const TOOL: &str = "cwx";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub passed: Option<bool>,
    pub results: Vec<Value>,
}

impl Document {
    pub fn new(command: &str, config: Value, results: Vec<Value>, passed: Option<bool>) -> Document {
        Document {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            config,
            passed,
            results,
        }
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidInput(format!("serialisation failed: {e}")))?;
        writeln!(out, "{s}").map_err(io_err)
    }

    /// Flattened rows; every row carries the same columns.
    pub fn rows(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let flat: Vec<Map<String, Value>> = self
            .results
            .iter()
            .map(|r| {
                let mut m = Map::new();
                flatten("", r, &mut m);
                let mut c = Map::new();
                flatten("config", &self.config, &mut c);
                m.extend(c);
                m
            })
            .collect();
        let mut keys: Vec<String> = flat.iter().flat_map(|m| m.keys().cloned()).collect();
        keys.sort_by(|a, b| (a.starts_with("config."), a).cmp(&(b.starts_with("config."), b)));
        keys.dedup();
        let mut header = vec!["tool".to_string(), "version".into(), "command".into()];
        header.extend(keys.iter().cloned());
        let rows = flat
            .iter()
            .map(|m| {
                let mut row = vec![self.tool.clone(), self.version.clone(), self.command.clone()];
                row.extend(keys.iter().map(|k| m.get(k).map(cell).unwrap_or_default()));
                row
            })
            .collect();
        (header, rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let (header, rows) = self.rows();
        let mut w = csv::Writer::from_path(path)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
        let csv_err = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        for r in rows {
            w.write_record(&r).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("write failed: {e}"))
}

fn flatten(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let d = Document::new(
            "x",
            json!({"seed": 1}),
            vec![json!({"a": 1.5, "b": {"c": "z", "d": null}, "e": [1, 2]})],
            None,
        );
        let (h, rows) = d.rows();
        assert_eq!(h, ["tool", "version", "command", "a", "b.c", "b.d", "e", "config.seed"]);
        assert_eq!(rows[0][3..], ["1.5", "z", "", "[1,2]", "1"]);
    }

    #[test]
    fn json_round_trip() {
        let d = Document::new("y", json!({}), vec![json!({"v": 0.1})], Some(true));
        let mut buf = Vec::new();
        d.write_json(&mut buf).unwrap();
        let back: Document = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, d);
    }
}

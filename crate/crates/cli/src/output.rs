//! Rendering of reports as JSON, CSV or text.
//!
//! Everything goes through `serde_json::Value`, whose maps are ordered by
//! key, so identical inputs give byte-identical output.
//!
//! CSV and text use the same flattening: nested objects become dotted column
//! names, lists of scalars are joined with `;`, lists of pairs (such as
//! factorisations) become `a:b;c:d`, and any other list is embedded as
//! compact JSON. A top-level list yields one row per element.

use std::collections::BTreeMap;
use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn cell(v: &Value) -> String {
    if let Some(s) = scalar(v) {
        return s;
    }
    if let Value::Array(items) = v {
        let joined: Option<Vec<String>> = items
            .iter()
            .map(|item| match item {
                Value::Array(inner) => inner
                    .iter()
                    .map(scalar)
                    .collect::<Option<Vec<_>>>()
                    .map(|parts| parts.join(":")),
                other => scalar(other),
            })
            .collect();
        if let Some(parts) = joined {
            return parts.join(";");
        }
    }
    v.to_string()
}

fn flatten_into(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&key, child, out);
            }
        }
        _ => {
            let key = if prefix.is_empty() { "value".to_string() } else { prefix.to_string() };
            out.insert(key, cell(v));
        }
    }
}

fn rows(v: &Value) -> Vec<BTreeMap<String, String>> {
    let records: Vec<&Value> = match v {
        Value::Array(items) => items.iter().collect(),
        other => vec![other],
    };
    records
        .into_iter()
        .map(|r| {
            let mut row = BTreeMap::new();
            flatten_into("", r, &mut row);
            row
        })
        .collect()
}

pub fn render(v: &Value, format: Format) -> io::Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v)? + "\n"),
        Format::Csv => {
            let rows = rows(v);
            let mut header: Vec<String> = rows.iter().flat_map(|r| r.keys().cloned()).collect();
            header.sort();
            header.dedup();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header)?;
            for row in &rows {
                w.write_record(header.iter().map(|h| row.get(h).map_or("", String::as_str)))?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Text => {
            let blocks: Vec<String> = rows(v)
                .iter()
                .map(|row| row.iter().map(|(k, val)| format!("{k}: {val}\n")).collect())
                .collect();
            Ok(blocks.join("\n"))
        }
    }
}

pub fn emit(v: &Value, format: Format) -> io::Result<()> {
    let text = render(v, format)?;
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()
}

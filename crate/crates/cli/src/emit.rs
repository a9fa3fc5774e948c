//! CSV tables and JSON documents.

use crate::config::{Format, RunConfig};
use crate::CliError;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => number(*v),
            Cell::Text(s) => quote(s),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

/// Ten significant digits in scientific notation.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.9e}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A table plus the JSON payload that goes with it.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub result: Value,
}

impl Output {
    pub fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// The configuration and the result in one document.
    pub fn document(&self, rc: &RunConfig) -> Value {
        json!({
            "command": rc.command.name(),
            "seed": rc.seed,
            "config": rc.to_pairs(),
            "spec": rc,
            "result": self.result,
        })
    }
}

/// Where the reproducibility sidecar of a CSV file goes.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("spec.json")
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes the output as configured and returns what goes to stdout.
///
/// CSV to a file also writes the sidecar; without an output path the
/// document goes to stdout only.
pub fn emit(out: &Output, rc: &RunConfig) -> Result<String, CliError> {
    let body = match rc.format {
        Format::Csv => out.csv(),
        Format::Json => pretty(&out.document(rc)),
    };
    match &rc.output {
        None => Ok(body),
        Some(path) => {
            write(path, &body)?;
            if rc.format == Format::Csv {
                write(&sidecar_path(path), &pretty(&out.document(rc)))?;
            }
            Ok(String::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(number(1.0), "1.000000000e0");
        assert_eq!(number(-0.000123456789012), "-1.234567890e-4");
        assert_eq!(number(2.0 / 3.0), "6.666666667e-1");
        assert_eq!(number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let out = Output {
            header: vec!["name", "value", "ok"],
            rows: vec![
                vec![Cell::Text("a,b".into()), Cell::Num(0.5), Cell::Flag(true)],
                vec![Cell::Text("c".into()), Cell::Int(3), Cell::Flag(false)],
            ],
            result: Value::Null,
        };
        assert_eq!(out.csv(), "name,value,ok\n\"a,b\",5.000000000e-1,true\nc,3,false\n");
    }

    #[test]
    fn sidecar_next_to_csv() {
        assert_eq!(sidecar_path(Path::new("runs/out.csv")), PathBuf::from("runs/out.spec.json"));
    }
}

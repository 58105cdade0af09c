//! Deterministic CSV and JSON writing.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::Failure;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Quotes a CSV field when it holds a separator, quote or newline.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn numbers(&mut self, values: &[f64]) {
        let row: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.row(&row);
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or to standard output when `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Runtime(format!("cannot write to standard output: {e}")))
        }
    }
}

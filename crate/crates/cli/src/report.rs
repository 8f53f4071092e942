//! Machine-readable run reports and human-readable tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL_NAME: &str = "scorelab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a run. Carries no timestamps so that
/// repeated runs produce identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub options: Value,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: &str, options: Value, inputs: &[PathBuf], seed: u64) -> CliResult<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                let bytes = fs::read(p)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: hex::encode(Sha256::digest(&bytes)),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Self {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            options,
            inputs,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: RunManifest,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub summary: Value,
    pub records: Vec<Value>,
}

impl Report {
    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Numeric(format!("cannot serialize report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        fs::write(path, self.to_json()?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

pub fn read_report(path: &Path) -> CliResult<Report> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// JSON number, or `"inf"`, `"-inf"`, `"nan"` for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Numeric(format!("cannot serialize: {e}")))
}

/// Decimal rendering with nine significant digits.
pub fn fmt9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..9).contains(&exp) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit
    if s.trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 9
        && decimals > 0
    {
        return format!("{v:.prec$}", prec = decimals - 1);
    }
    s
}

/// Left-aligned text table.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn write(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(&self.header))?;
        for r in &self.rows {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt9(std::f64::consts::LN_2), "0.693147181");
        assert_eq!(fmt9(0.15827935153698125), "0.158279352");
        assert_eq!(fmt9(1.5), "1.50000000");
        assert_eq!(fmt9(-123.456), "-123.456000");
        assert_eq!(fmt9(0.9999999999), "1.00000000");
        assert_eq!(fmt9(1e-7), "1.00000000e-7");
        assert_eq!(fmt9(f64::INFINITY), "inf");
        assert_eq!(fmt9(0.0), "0");
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), Value::from("inf"));
        assert_eq!(num(f64::NEG_INFINITY), Value::from("-inf"));
        assert_eq!(num(0.25), Value::from(0.25));
    }

    #[test]
    fn report_roundtrip() {
        let r = Report {
            manifest: RunManifest {
                tool: TOOL_NAME.into(),
                version: TOOL_VERSION.into(),
                command: "entropy".into(),
                options: serde_json::json!({"dist": "0.5,0.5"}),
                inputs: vec![],
                seed: 42,
            },
            notes: vec![],
            summary: serde_json::json!({"entropy": 0.1 + 0.2}),
            records: vec![serde_json::json!({"x": 1.0 / 3.0, "y": num(f64::INFINITY)})],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        r.write(&path).unwrap();
        assert_eq!(read_report(&path).unwrap(), r);
    }
}

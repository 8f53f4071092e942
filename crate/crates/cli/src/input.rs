//! Readers for forecast, outcome and sample files.
//!
//! * Categorical forecasts: CSV with header `f1,...,fm`, one forecast per row.
//! * Categorical outcomes: one 1-based category index per line.
//! * Density forecasts: JSON object `{"lo", "hi", "n", "values"}` or an array
//!   of such objects.
//! * Density outcomes and samples: one real number per line.
//!
//! Blank lines and lines starting with `#` are skipped in line-based files.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use scorelab::{Grid, GridDensity, ProbVector};

use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Values with the 1-based source line each came from.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub values: Vec<T>,
    pub lines: Vec<usize>,
}

impl<T> Located<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn looks_like_json(path: &Path) -> CliResult<bool> {
    Ok(matches!(
        read(path)?.trim_start().chars().next(),
        Some('{') | Some('[')
    ))
}

pub fn read_categorical_forecasts(path: &Path) -> CliResult<Located<ProbVector>> {
    let text = read(path)?;
    let name = path.display();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{name}: {e}")))?
        .clone();
    let m = header.len();
    for (k, h) in header.iter().enumerate() {
        if !h.eq_ignore_ascii_case(&format!("f{}", k + 1)) {
            return Err(CliError::Validation(format!(
                "{name} line 1: header must be f1,...,fm; column {} is `{h}`",
                k + 1
            )));
        }
    }
    if m < 2 {
        return Err(CliError::Validation(format!(
            "{name} line 1: need at least two categories"
        )));
    }
    let mut out = Located {
        values: Vec::new(),
        lines: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("{name}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let probs = record
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    CliError::Validation(format!("{name} line {line}: `{s}` is not a number"))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        let f = ProbVector::new(probs)
            .map_err(|e| CliError::Validation(format!("{name} line {line}: {e}")))?;
        out.values.push(f);
        out.lines.push(line);
    }
    if out.is_empty() {
        return Err(CliError::Validation(format!("{name}: no forecasts")));
    }
    Ok(out)
}

fn read_lines<T>(
    path: &Path,
    what: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> CliResult<Located<T>> {
    let text = read(path)?;
    let mut out = Located {
        values: Vec::new(),
        lines: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let v = parse(s).ok_or_else(|| {
            CliError::Validation(format!(
                "{} line {}: `{s}` is not {what}",
                path.display(),
                i + 1
            ))
        })?;
        out.values.push(v);
        out.lines.push(i + 1);
    }
    if out.is_empty() {
        return Err(CliError::Validation(format!(
            "{}: no values",
            path.display()
        )));
    }
    Ok(out)
}

pub fn read_categorical_outcomes(path: &Path) -> CliResult<Located<usize>> {
    read_lines(path, "a 1-based category index", |s| {
        s.parse::<usize>().ok()
    })
}

pub fn read_reals(path: &Path) -> CliResult<Located<f64>> {
    read_lines(path, "a finite real number", |s| {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityFile {
    lo: f64,
    hi: f64,
    n: usize,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum DensityDocument {
    One(DensityFile),
    Many(Vec<DensityFile>),
}

fn to_density(d: DensityFile) -> scorelab::Result<GridDensity> {
    GridDensity::new(Grid::new(d.lo, d.hi, d.n)?, d.values)
}

pub fn read_density_forecasts(path: &Path) -> CliResult<Vec<GridDensity>> {
    let text = read(path)?;
    let name = path.display();
    let doc: DensityDocument =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{name}: {e}")))?;
    match doc {
        DensityDocument::One(d) => {
            Ok(vec![to_density(d).map_err(|e| {
                CliError::Validation(format!("{name}: {e}"))
            })?])
        }
        DensityDocument::Many(ds) => {
            if ds.is_empty() {
                return Err(CliError::Validation(format!("{name}: no forecasts")));
            }
            ds.into_iter()
                .enumerate()
                .map(|(i, d)| {
                    to_density(d).map_err(|e| {
                        CliError::Validation(format!("{name} forecast {}: {e}", i + 1))
                    })
                })
                .collect()
        }
    }
}

/// Comma-separated probabilities such as `0.5,0.5`.
pub fn parse_prob_list(text: &str) -> CliResult<ProbVector> {
    let probs = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("`{}` is not a number", s.trim())))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(ProbVector::new(probs)?)
}

/// Whether `text` is an inline number list rather than a path.
pub fn is_inline_list(text: &str) -> bool {
    text.contains(',')
        && text
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | 'e' | 'E' | '-' | '+' | ' '))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn categorical_rows_and_line_numbers() {
        let f = file("f1,f2\n0.8,0.2\n0.5,0.5\n");
        let r = read_categorical_forecasts(f.path()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.lines, vec![2, 3]);
        let bad = file("f1,f2\n0.8,0.2\n0.6,0.3\n");
        let msg = read_categorical_forecasts(bad.path())
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 3"), "{msg}");
        let header = file("a,b\n0.5,0.5\n");
        assert!(read_categorical_forecasts(header.path()).is_err());
    }

    #[test]
    fn outcomes_skip_comments() {
        let f = file("# outcomes\n1\n\n2\n");
        let r = read_categorical_outcomes(f.path()).unwrap();
        assert_eq!(r.values, vec![1, 2]);
        assert_eq!(r.lines, vec![2, 4]);
        let bad = file("1\nx\n");
        assert!(read_categorical_outcomes(bad.path())
            .unwrap_err()
            .to_string()
            .contains("line 2"));
    }

    #[test]
    fn density_documents() {
        let one = file(r#"{"lo": 0, "hi": 1, "n": 3, "values": [1, 1, 1]}"#);
        assert_eq!(read_density_forecasts(one.path()).unwrap().len(), 1);
        assert!(looks_like_json(one.path()).unwrap());
        let many = file(
            r#"[{"lo": 0, "hi": 1, "n": 3, "values": [1, 1, 1]},
                {"lo": 0, "hi": 1, "n": 3, "values": [1, 1]}]"#,
        );
        let msg = read_density_forecasts(many.path()).unwrap_err().to_string();
        assert!(msg.contains("forecast 2"), "{msg}");
    }

    #[test]
    fn inline_lists() {
        assert!(is_inline_list("0.5,0.5"));
        assert!(!is_inline_list("forecast.csv"));
        assert!(parse_prob_list("0.2, 0.8").is_ok());
        assert!(parse_prob_list("0.2,0.7").is_err());
    }
}

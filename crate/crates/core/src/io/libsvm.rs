//! LIBSVM text format: `<label> <index>:<value> ...` with 1-based, strictly
//! increasing indices. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use crate::data::{Dataset, SparseVector};
use crate::error::{Error, Result};

struct Row {
    label: f64,
    indices: Vec<usize>,
    values: Vec<f64>,
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} '{tok}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite {what} '{tok}'"),
        });
    }
    Ok(v)
}

fn parse_row(text: &str, line: usize) -> Result<Row> {
    let mut toks = text.split_ascii_whitespace();
    let label = parse_real(toks.next().expect("non-blank line"), line, "label")?;
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for tok in toks {
        let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected index:value, found '{tok}'"),
        })?;
        let idx: usize = idx.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid feature index '{idx}'"),
        })?;
        if idx == 0 {
            return Err(Error::Parse {
                line,
                msg: "feature indices are 1-based".into(),
            });
        }
        if indices.last().is_some_and(|&last| idx - 1 <= last) {
            return Err(Error::Parse {
                line,
                msg: format!("feature index {idx} is not increasing"),
            });
        }
        indices.push(idx - 1);
        values.push(parse_real(val, line, "feature value")?);
    }
    Ok(Row {
        label,
        indices,
        values,
    })
}

/// Parses a whole file. The dimension is the largest index seen unless `dim`
/// is given, in which case it must cover every index.
pub fn parse_libsvm(text: &str, dim: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut max_dim = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let row = parse_row(body, line)?;
        if let Some(&last) = row.indices.last() {
            if let Some(d) = dim {
                if last >= d {
                    return Err(Error::Parse {
                        line,
                        msg: format!("feature index {} exceeds dimension {d}", last + 1),
                    });
                }
            }
            max_dim = max_dim.max(last + 1);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = dim.unwrap_or(max_dim);
    let mut labels = Vec::with_capacity(rows.len());
    let mut samples = Vec::with_capacity(rows.len());
    for r in rows {
        labels.push(r.label);
        samples.push(SparseVector::new(r.indices, r.values, d)?);
    }
    Dataset::new(samples, labels, d)
}

pub fn read_libsvm(path: &Path, dim: Option<usize>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(&text, dim)
}

/// Canonical text: shortest round-trip decimals, single spaces, one row per
/// line. Unlabelled datasets are written with label 0.
pub fn to_libsvm(data: &Dataset) -> String {
    let mut out = String::new();
    for i in 0..data.n() {
        let label = if data.has_labels() { data.label(i) } else { 0.0 };
        write!(out, "{label}").unwrap();
        for (j, v) in data.sample(i).iter() {
            write!(out, " {}:{v}", j + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_libsvm(path: &Path, data: &Dataset) -> Result<()> {
    std::fs::write(path, to_libsvm(data)).map_err(|e| Error::io(path, e))
}

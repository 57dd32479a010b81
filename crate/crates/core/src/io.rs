//! The `SDPM1` model file.
//!
//! ```text
//! # optional comments, before the header only
//! SDPM1
//! <d> <k>
//! k blocks of d lines, each with d space-separated decimals
//! ```
//!
//! Entries are written with 17 significant digits, which reproduces every
//! `f64` exactly on reading.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::symmat::SymmetricMatrix;

pub const MODEL_MAGIC: &str = "SDPM1";

pub fn format_model(params: &ModelParams) -> String {
    let mut out = String::new();
    writeln!(out, "{MODEL_MAGIC}").unwrap();
    writeln!(out, "{} {}", params.dim(), params.num_classes()).unwrap();
    for a in params.matrices() {
        for row in a.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
    }
    out
}

pub fn parse_model(text: &str) -> Result<ModelParams> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (line_no, magic) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::parse(1, "missing SDPM1 header"))?;
    if magic != MODEL_MAGIC {
        return Err(Error::parse(
            line_no,
            format!("expected {MODEL_MAGIC}, found {magic:?}"),
        ));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty());
    let (line_no, shape) = body
        .next()
        .ok_or_else(|| Error::parse(line_no + 1, "missing dimension line"))?;
    let shape: Vec<usize> = shape
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(line_no, "dimension line must be two integers"))?;
    let (dim, k) = match shape[..] {
        [d, k] if d >= 1 && k >= 2 => (d, k),
        _ => {
            return Err(Error::parse(
                line_no,
                "expected \"<d> <k>\" with d >= 1, k >= 2",
            ))
        }
    };

    let mut matrices = Vec::with_capacity(k);
    let mut last_line = line_no;
    for _ in 0..k {
        let mut rows = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (line_no, line) = body
                .next()
                .ok_or_else(|| Error::parse(last_line + 1, "unexpected end of model file"))?;
            last_line = line_no;
            let mut row = Vec::with_capacity(dim);
            for (j, tok) in line.split_whitespace().enumerate() {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column: Some(j + 1),
                    message: format!("{tok:?} is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        column: Some(j + 1),
                        message: "entry is not finite".into(),
                    });
                }
                row.push(v);
            }
            if row.len() != dim {
                return Err(Error::parse(
                    line_no,
                    format!("expected {dim} entries, found {}", row.len()),
                ));
            }
            rows.push(row);
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::parse(
                        last_line,
                        format!(
                            "matrix {} is not symmetric at ({i}, {j})",
                            matrices.len() + 1
                        ),
                    ));
                }
            }
        }
        matrices.push(SymmetricMatrix::from_rows(&rows)?);
    }
    if let Some((line_no, _)) = body.next() {
        return Err(Error::parse(
            line_no,
            "trailing content after the last matrix",
        ));
    }
    ModelParams::new(matrices)
}

pub fn save_model(params: &ModelParams, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_model(params))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelParams> {
    parse_model(&std::fs::read_to_string(path)?)
}

/// Write-then-read through the text format.
pub fn model_roundtrip(params: &ModelParams) -> Result<ModelParams> {
    parse_model(&format_model(params))
}

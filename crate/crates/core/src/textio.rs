//! Plain-text matrix and CSV readers/writers.
//!
//! Dense matrix files hold one row per line with whitespace-separated tokens.
//! A token is a decimal float, `inf` or `-inf`; lines starting with `#` are
//! comments. The semiring is not stored in the file.

use std::fmt::Write as _;

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};

/// Parses one numeric token. NaN is rejected.
pub fn parse_token(tok: &str) -> Result<f64> {
    let v = match tok {
        "inf" | "+inf" | "Inf" | "+Inf" => f64::INFINITY,
        "-inf" | "-Inf" => f64::NEG_INFINITY,
        _ => tok
            .parse::<f64>()
            .map_err(|_| TropError::Parse(format!("cannot parse token {tok:?}")))?,
    };
    if v.is_nan() {
        return Err(TropError::Parse(format!("NaN token {tok:?}")));
    }
    Ok(v)
}

/// Formats a value so that parsing it back yields the same bits.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

fn rows_of(text: &str, split: impl Fn(&str) -> Vec<&str>) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = split(line)
            .into_iter()
            .map(|t| {
                parse_token(t.trim()).map_err(|e| match e {
                    TropError::Parse(msg) => {
                        TropError::Parse(format!("line {}: {msg}", lineno + 1))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(TropError::Parse("no data rows".into()));
    }
    Ok(rows)
}

/// Reads a whitespace-separated numeric table.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>> {
    rows_of(text, |l| l.split_whitespace().collect())
}

/// Reads a comma-separated numeric table; `#` lines act as headers/comments.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    rows_of(text, |l| l.split(',').collect())
}

pub fn parse_matrix(text: &str, semiring: Semiring) -> Result<TropicalMatrix> {
    let rows = parse_table(text)?;
    if let Some(i) = rows.iter().position(|r| r.len() != rows[0].len()) {
        return Err(TropError::Parse(format!(
            "row {} has {} entries, expected {}",
            i + 1,
            rows[i].len(),
            rows[0].len()
        )));
    }
    TropicalMatrix::from_rows(&rows, semiring)
}

/// Reads a vector written either as one row or as one value per line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let rows = parse_table(text)?;
    if rows.len() == 1 {
        return Ok(rows.into_iter().next().unwrap());
    }
    if rows.iter().all(|r| r.len() == 1) {
        return Ok(rows.into_iter().map(|r| r[0]).collect());
    }
    Err(TropError::Parse(
        "vector file must be a single row or a single column".into(),
    ))
}

pub fn write_rows(rows: &[Vec<f64>], sep: &str) -> String {
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().map(|&v| format_value(v)).collect();
        let _ = writeln!(out, "{}", line.join(sep));
    }
    out
}

pub fn write_matrix(m: &TropicalMatrix) -> String {
    write_rows(&m.to_rows(), " ")
}

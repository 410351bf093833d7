//! Plain-text matrix container and a Matrix Market reader.
//!
//! The native format is a header line `complex-matrix v1 <rows> <cols>`
//! followed by `rows * cols` whitespace-separated `re im` pairs in row
//! order. A zero-dimension matrix is the header alone.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub const HEADER_TAG: &str = "complex-matrix";
pub const FORMAT_VERSION: &str = "v1";

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(format!("invalid number `{tok}`")))
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(format!("missing {what}")))?;
    tok.parse::<usize>()
        .map_err(|_| parse_err(format!("invalid {what} `{tok}`")))
}

/// Shortest round-tripping text for `x`, switching to exponent form for
/// very large or very small magnitudes.
fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-5..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn write_matrix_string(m: &ComplexMatrix) -> String {
    let mut out = format!("{HEADER_TAG} {FORMAT_VERSION} {} {}\n", m.rows(), m.cols());
    if m.cols() == 0 {
        return out;
    }
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{} {}", fmt_f64(z.re), fmt_f64(z.im))
            })
            .collect();
        let _ = writeln!(out, "{}", row.join("  "));
    }
    out
}

pub fn parse_native(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines();
    let header = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| parse_err("empty input"))?;
    let mut h = header.split_whitespace();
    if h.next() != Some(HEADER_TAG) {
        return Err(parse_err(format!("expected `{HEADER_TAG}` header, got `{header}`")));
    }
    match h.next() {
        Some(FORMAT_VERSION) => {}
        other => return Err(parse_err(format!("unsupported format version {other:?}"))),
    }
    let rows = parse_usize(h.next(), "row count")?;
    let cols = parse_usize(h.next(), "column count")?;
    if h.next().is_some() {
        return Err(parse_err("trailing tokens in header"));
    }
    let nums = lines
        .flat_map(str::split_whitespace)
        .map(parse_f64)
        .collect::<Result<Vec<f64>>>()?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(2))
        .ok_or_else(|| parse_err("dimensions overflow"))?;
    if nums.len() != expected {
        return Err(parse_err(format!(
            "{rows}x{cols} matrix needs {expected} numbers, found {}",
            nums.len()
        )));
    }
    let data = nums.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    ComplexMatrix::new(rows, cols, data)
}

/// Reads `array` or `coordinate` Matrix Market data with `real`, `integer`
/// or `complex` fields and `general` symmetry.
pub fn parse_matrix_market(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines();
    let banner = lines.next().ok_or_else(|| parse_err("empty input"))?;
    let b: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if b.len() != 5 || b[0] != "%%matrixmarket" || b[1] != "matrix" {
        return Err(parse_err(format!("bad Matrix Market banner `{banner}`")));
    }
    let coordinate = match b[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(parse_err(format!("unsupported Matrix Market format `{f}`"))),
    };
    let complex = match b[3].as_str() {
        "complex" => true,
        "real" | "integer" => false,
        f => return Err(parse_err(format!("unsupported Matrix Market field `{f}`"))),
    };
    if b[4] != "general" {
        return Err(parse_err(format!("unsupported Matrix Market symmetry `{}`", b[4])));
    }
    let mut body = lines.filter(|l| !l.trim_start().starts_with('%') && !l.trim().is_empty());
    let size_line = body.next().ok_or_else(|| parse_err("missing size line"))?;
    let mut s = size_line.split_whitespace();
    let rows = parse_usize(s.next(), "row count")?;
    let cols = parse_usize(s.next(), "column count")?;
    let per = if complex { 2 } else { 1 };
    let mut m = ComplexMatrix::zeros(rows, cols);
    if coordinate {
        let nnz = parse_usize(s.next(), "entry count")?;
        let mut seen = 0;
        for line in body {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 + per {
                return Err(parse_err(format!("bad coordinate entry `{line}`")));
            }
            let i = parse_usize(Some(t[0]), "row index")?;
            let j = parse_usize(Some(t[1]), "column index")?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(parse_err(format!("entry ({i}, {j}) out of range")));
            }
            let re = parse_f64(t[2])?;
            let im = if complex { parse_f64(t[3])? } else { 0.0 };
            m[(i - 1, j - 1)] += Complex64::new(re, im);
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(format!("expected {nnz} entries, found {seen}")));
        }
    } else {
        let nums = body
            .flat_map(str::split_whitespace)
            .map(parse_f64)
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != rows * cols * per {
            return Err(parse_err(format!(
                "array needs {} numbers, found {}",
                rows * cols * per,
                nums.len()
            )));
        }
        // Column-major order.
        for (idx, c) in nums.chunks_exact(per).enumerate() {
            let (i, j) = (idx % rows, idx / rows);
            m[(i, j)] = Complex64::new(c[0], if complex { c[1] } else { 0.0 });
        }
    }
    Ok(m)
}

/// Parses either format, picked by the first line.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let first = text.trim_start();
    if first.to_ascii_lowercase().starts_with("%%matrixmarket") {
        parse_matrix_market(first)
    } else {
        parse_native(text)
    }
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_matrix(&text)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, write_matrix_string(m))?;
    Ok(())
}

//! Plain-text tensor and vector files.
//!
//! ```text
//! tensor <m> <n> <nnz>
//! <i1> ... <im> <value>      (nnz lines, 1-based indices)
//!
//! vector <n>
//! <value>                    (n lines)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Values are written
//! with 17 significant digits, so parsing a serialized file reproduces every
//! value bit for bit.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} '{tok}'")))
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad value '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

pub fn parse_tensor(text: &str) -> Result<Tensor> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "tensor" {
        return Err(parse_err(hline, "expected header 'tensor <m> <n> <nnz>'"));
    }
    let order = parse_usize(toks[1], hline, "order")?;
    let dim = parse_usize(toks[2], hline, "dimension")?;
    let nnz = parse_usize(toks[3], hline, "nonzero count")?;
    if order == 0 || dim == 0 {
        return Err(parse_err(hline, "order and dimension must be >= 1"));
    }

    let mut entries: Vec<(Vec<usize>, f64)> = Vec::with_capacity(nnz);
    let mut seen = std::collections::HashMap::with_capacity(nnz);
    for (line, body) in lines {
        if entries.len() == nnz {
            return Err(parse_err(line, format!("more than {nnz} entries")));
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != order + 1 {
            return Err(parse_err(
                line,
                format!(
                    "expected {order} indices and a value, found {} fields",
                    toks.len()
                ),
            ));
        }
        let mut idx = Vec::with_capacity(order);
        for tok in &toks[..order] {
            let i = parse_usize(tok, line, "index")?;
            if i == 0 || i > dim {
                return Err(parse_err(line, format!("index {i} outside 1..={dim}")));
            }
            idx.push(i - 1);
        }
        let v = parse_value(toks[order], line)?;
        if let Some(first) = seen.insert(idx.clone(), line) {
            return Err(parse_err(
                line,
                format!("duplicate index tuple (first on line {first})"),
            ));
        }
        entries.push((idx, v));
    }
    if entries.len() != nnz {
        return Err(parse_err(
            hline,
            format!("header declares {nnz} entries, found {}", entries.len()),
        ));
    }
    Tensor::from_entries(order, dim, entries).map_err(|e| parse_err(hline, e.to_string()))
}

pub fn serialize_tensor(t: &Tensor) -> String {
    let mut out = format!("tensor {} {} {}\n", t.order(), t.dim(), t.nnz());
    for (idx, v) in t.entries() {
        for i in idx {
            write!(out, "{} ", i + 1).unwrap();
        }
        writeln!(out, "{}", format_value(v)).unwrap();
    }
    out
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != "vector" {
        return Err(parse_err(hline, "expected header 'vector <n>'"));
    }
    let n = parse_usize(toks[1], hline, "length")?;
    let mut out = Vec::with_capacity(n);
    for (line, body) in lines {
        if out.len() == n {
            return Err(parse_err(line, format!("more than {n} values")));
        }
        let mut toks = body.split_whitespace();
        let tok = toks.next().unwrap_or_default();
        if toks.next().is_some() {
            return Err(parse_err(line, "expected one value per line"));
        }
        out.push(parse_value(tok, line)?);
    }
    if out.len() != n {
        return Err(parse_err(
            hline,
            format!("header declares {n} values, found {}", out.len()),
        ));
    }
    Ok(out)
}

pub fn serialize_vector(x: &[f64]) -> String {
    let mut out = format!("vector {}\n", x.len());
    for &v in x {
        writeln!(out, "{}", format_value(v)).unwrap();
    }
    out
}

/// 17 significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

//! Plain-text matrix files.
//!
//! ```text
//! 2 3 real
//! 1 0 -2.5
//! 0 1 4
//! ```
//!
//! The header gives rows, columns and field (`real` or `complex`), followed by
//! one line per row. Complex entries are written `(re,im)`. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Digits at which [`write_matrix`] switches to round-trip exact scientific
/// notation.
pub const EXACT_PRECISION: usize = 17;

/// Display precision used unless overridden.
pub const DEFAULT_PRECISION: usize = 5;

/// A matrix over either field, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Real(Matrix<f64>),
    Complex(Matrix<Complex64>),
}

impl AnyMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            AnyMatrix::Real(m) => m.shape(),
            AnyMatrix::Complex(m) => m.shape(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, AnyMatrix::Complex(_))
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        match self {
            AnyMatrix::Real(m) => m.to_complex(),
            AnyMatrix::Complex(m) => m.clone(),
        }
    }
}

impl From<Matrix<f64>> for AnyMatrix {
    fn from(m: Matrix<f64>) -> Self {
        AnyMatrix::Real(m)
    }
}

impl From<Matrix<Complex64>> for AnyMatrix {
    fn from(m: Matrix<Complex64>) -> Self {
        AnyMatrix::Complex(m)
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with 1-based start columns. A parenthesized
/// group counts as one token even if it contains spaces.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if bytes[i] == b'(' {
            while i < bytes.len() && bytes[i] != b')' {
                i += 1;
            }
            i = (i + 1).min(bytes.len());
        } else {
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
        }
        out.push((start + 1, &line[start..i]));
    }
    out
}

fn parse_real(tok: &str, line: usize, col: usize) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| parse_err(line, col, format!("invalid number `{tok}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, col, format!("non-finite entry `{tok}`")));
    }
    Ok(v)
}

fn parse_complex(tok: &str, line: usize, col: usize) -> Result<Complex64> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| parse_err(line, col, format!("expected `(re,im)`, found `{tok}`")))?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| parse_err(line, col, format!("missing `,` in `{tok}`")))?;
    Ok(Complex64::new(parse_real(re, line, col)?, parse_real(im, line, col)?))
}

/// Parses a matrix file.
pub fn parse_matrix(text: &str) -> Result<AnyMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing header"))?;
    let htoks = tokens(header);
    if htoks.len() != 3 {
        return Err(parse_err(hline, 1, "header must be `rows cols real|complex`"));
    }
    let dim = |(col, tok): (usize, &str)| -> Result<usize> {
        match tok.parse::<usize>() {
            Ok(0) | Err(_) => Err(parse_err(hline, col, format!("invalid dimension `{tok}`"))),
            Ok(d) => Ok(d),
        }
    };
    let rows = dim(htoks[0])?;
    let cols = dim(htoks[1])?;
    let complex = match htoks[2].1 {
        "real" => false,
        "complex" => true,
        other => return Err(parse_err(hline, htoks[2].0, format!("unknown field `{other}`"))),
    };

    let mut re = Vec::new();
    let mut cx = Vec::new();
    let mut seen = 0;
    for (lno, line) in lines {
        if seen == rows {
            return Err(Error::Dimension(format!(
                "line {lno}: more than the {rows} rows declared in the header"
            )));
        }
        let toks = tokens(line);
        if toks.len() != cols {
            return Err(Error::Dimension(format!(
                "line {lno}: expected {cols} entries, found {}",
                toks.len()
            )));
        }
        for (col, tok) in toks {
            if complex {
                cx.push(parse_complex(tok, lno, col)?);
            } else {
                re.push(parse_real(tok, lno, col)?);
            }
        }
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Dimension(format!("header declares {rows} rows, found {seen}")));
    }
    Ok(if complex {
        AnyMatrix::Complex(Matrix::new(rows, cols, cx)?)
    } else {
        AnyMatrix::Real(Matrix::new(rows, cols, re)?)
    })
}

fn fmt_real(out: &mut String, x: f64, precision: usize) {
    if precision >= EXACT_PRECISION {
        let _ = write!(out, "{:.*e}", precision - 1, x);
    } else {
        let _ = write!(out, "{:.*}", precision, x);
    }
}

fn write_generic<T: Scalar>(m: &Matrix<T>, precision: usize) -> String {
    let mut out = format!(
        "{} {} {}\n",
        m.rows(),
        m.cols(),
        if T::IS_COMPLEX { "complex" } else { "real" }
    );
    for i in 0..m.rows() {
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            if T::IS_COMPLEX {
                out.push('(');
                fmt_real(&mut out, x.re(), precision);
                out.push(',');
                fmt_real(&mut out, x.im(), precision);
                out.push(')');
            } else {
                fmt_real(&mut out, x.re(), precision);
            }
        }
        out.push('\n');
    }
    out
}

/// Formats a matrix. `precision` is the number of decimals below
/// [`EXACT_PRECISION`]; at or above it entries are written in scientific
/// notation with that many significant digits, which round-trips every
/// `f64` exactly.
pub fn write_matrix(m: &AnyMatrix, precision: usize) -> String {
    match m {
        AnyMatrix::Real(m) => write_generic(m, precision),
        AnyMatrix::Complex(m) => write_generic(m, precision),
    }
}

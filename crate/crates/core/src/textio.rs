//! Plain-text matrix exchange format and number formatting.
//!
//! A matrix file is a header line `rows cols` followed by `rows` lines of
//! `cols` whitespace-separated decimal numbers. Numbers are written with 17
//! significant digits so a round trip through text is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Formats like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("bad header: {e}"),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse {
            line: line_no,
            msg: "header must be `rows cols`".into(),
        });
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: line_no + r + 1,
            msg: format!("expected {rows} data rows, found {r}"),
        })?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
        if values.len() != cols {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {cols} values, found {}", values.len()),
            });
        }
        data.extend(values);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Parse {
            line: line_no,
            msg: "trailing data after matrix".into(),
        });
    }
    Matrix::new(rows, cols, data)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| fmt_g17(*v)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

/// Reads a vector stored either as a column (n x 1) or a row (1 x n).
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    match m.shape() {
        (_, 1) | (1, _) => Ok(m.as_slice().to_vec()),
        (r, c) => Err(Error::DimensionMismatch(format!(
            "expected a vector, found a {r}x{c} matrix"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(0.5), "0.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(0.375), "0.375");
        assert_eq!(fmt_g17(-2.5e-7), "-2.4999999999999999e-07");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_matrix("2 2\n1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("1 1\n1\n2\n").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(
            rows in 1usize..5,
            cols in 1usize..5,
            seed in proptest::collection::vec(-1e6f64..1e6, 25),
        ) {
            let m = Matrix::from_fn(rows, cols, |i, j| seed[i * 5 + j] / 3.0);
            let back = parse_matrix(&format_matrix(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}

//! Self-describing plain-text instance format for bit-exact replay.
//!
//! Layout: a magic line, `key = value` header lines (family, dimensions,
//! weights, seed, generator version), then labeled blocks `[A]` (one matrix
//! row per line) and `[b]` (one entry per line). All floats carry 17
//! significant digits, which round-trips `f64` exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::{LassoInstance, LogisticInstance, ProblemInstance, SimplexQpInstance};

const MAGIC: &str = "proxgrad-instance v1";

/// Formats a float with 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn instance_to_text(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    let mut header = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    match instance {
        ProblemInstance::Lasso(p) => {
            header("family", "lasso".into());
            header("m", p.design().rows().to_string());
            header("n", p.design().cols().to_string());
            header("lambda", fmt_f64(p.lambda()));
            header("seed", p.seed().to_string());
            header("generator", super::GENERATOR_VERSION.into());
            push_blocks(&mut out, p.design(), p.observations());
        }
        ProblemInstance::Logistic(p) => {
            header("family", "logistic".into());
            header("m", p.design().rows().to_string());
            header("n", p.design().cols().to_string());
            header("lambda", fmt_f64(p.lambda()));
            header("seed", p.seed().to_string());
            header("generator", super::GENERATOR_VERSION.into());
            push_blocks(&mut out, p.design(), p.labels());
        }
        ProblemInstance::SimplexQp(p) => {
            header("family", "qp".into());
            header("n", p.matrix().rows().to_string());
            header("s", fmt_f64(p.simplex_sum()));
            header("seed", p.seed().to_string());
            header("generator", super::GENERATOR_VERSION.into());
            push_blocks(&mut out, p.matrix(), p.linear_term());
        }
    }
    out
}

fn push_blocks(out: &mut String, matrix: &DenseMatrix, vector: &[f64]) {
    out.push_str("[A]\n");
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.push_str("[b]\n");
    for &v in vector {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
}

pub fn instance_from_text(text: &str) -> Result<ProblemInstance> {
    let mut lines = text.lines();
    match lines.next() {
        Some(line) if line.trim() == MAGIC => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "not a proxgrad instance file (first line {other:?})"
            )))
        }
    }

    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut matrix_rows: Vec<Vec<f64>> = Vec::new();
    let mut vector: Vec<f64> = Vec::new();
    let mut section = 0u8; // 0 header, 1 matrix, 2 vector
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[A]" => {
                section = 1;
                continue;
            }
            "[b]" => {
                section = 2;
                continue;
            }
            _ => {}
        }
        match section {
            0 => {
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::InvalidArgument(format!("malformed header line: {line:?}"))
                })?;
                header.insert(key.trim().to_string(), value.trim().to_string());
            }
            1 => {
                let row = parse_floats(line)?;
                matrix_rows.push(row);
            }
            _ => {
                vector.push(parse_one_float(line)?);
            }
        }
    }

    let family = header
        .get("family")
        .ok_or_else(|| Error::InvalidArgument("missing family".into()))?
        .clone();
    let seed: u64 = parse_header(&header, "seed")?;

    let rows = matrix_rows.len();
    let cols = matrix_rows.first().map_or(0, |r| r.len());
    if matrix_rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("ragged matrix block".into()));
    }
    let matrix = DenseMatrix::new(rows, cols, matrix_rows.into_iter().flatten().collect())?;

    match family.as_str() {
        "lasso" => {
            let lambda: f64 = parse_header(&header, "lambda")?;
            expect_dims(&header, rows, cols)?;
            Ok(ProblemInstance::Lasso(LassoInstance::new(
                matrix, vector, lambda, seed,
            )?))
        }
        "logistic" => {
            let lambda: f64 = parse_header(&header, "lambda")?;
            expect_dims(&header, rows, cols)?;
            Ok(ProblemInstance::Logistic(LogisticInstance::new(
                matrix, vector, lambda, seed,
            )?))
        }
        "qp" => {
            let s: f64 = parse_header(&header, "s")?;
            Ok(ProblemInstance::SimplexQp(SimplexQpInstance::new(
                matrix, vector, s, seed,
            )?))
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown problem family {other:?}"
        ))),
    }
}

fn expect_dims(header: &BTreeMap<String, String>, rows: usize, cols: usize) -> Result<()> {
    let m: usize = parse_header(header, "m")?;
    let n: usize = parse_header(header, "n")?;
    if m != rows || n != cols {
        return Err(Error::InvalidArgument(format!(
            "header claims {m}x{n} but matrix block is {rows}x{cols}"
        )));
    }
    Ok(())
}

fn parse_header<T: std::str::FromStr>(header: &BTreeMap<String, String>, key: &str) -> Result<T> {
    header
        .get(key)
        .ok_or_else(|| Error::InvalidArgument(format!("missing header key {key:?}")))?
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("unparseable header value for {key:?}")))
}

fn parse_floats(line: &str) -> Result<Vec<f64>> {
    line.split_whitespace().map(parse_one_float).collect()
}

fn parse_one_float(token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("unparseable float {token:?}")))
}

//! Plain-text dump of a [`ConeProgram`], used to hand programs between the
//! CLI and debugging sessions.
//!
//! ```text
//! coneprog 1
//! size <rows> <cols>
//! cone zero|nonneg|soc <dim>      one line per block, in row order
//! c <col> <value>
//! b <row> <value>
//! a <row> <col> <value>
//! ```
//!
//! Entries of `c` and `b` that are not listed are zero. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write;

use thiserror::Error;

use super::{Cone, ConeProgram, SparseMatrix};

/// Largest row or column count accepted by [`read_program`].
pub const MAX_DUMP_DIM: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DumpError {
    DumpError {
        line,
        message: message.into(),
    }
}

pub fn write_program(p: &ConeProgram) -> String {
    let mut out = String::new();
    out.push_str("coneprog 1\n");
    let _ = writeln!(out, "size {} {}", p.a.rows, p.a.cols);
    for cone in &p.cones {
        let (kind, d) = match *cone {
            Cone::Zero(d) => ("zero", d),
            Cone::NonNeg(d) => ("nonneg", d),
            Cone::SecondOrder(d) => ("soc", d),
        };
        let _ = writeln!(out, "cone {kind} {d}");
    }
    for (j, v) in p.c.iter().enumerate() {
        if *v != 0.0 {
            let _ = writeln!(out, "c {j} {v}");
        }
    }
    for (i, v) in p.b.iter().enumerate() {
        if *v != 0.0 {
            let _ = writeln!(out, "b {i} {v}");
        }
    }
    for &(i, j, v) in &p.a.entries {
        let _ = writeln!(out, "a {i} {j} {v}");
    }
    out
}

pub fn read_program(text: &str) -> Result<ConeProgram, DumpError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "coneprog 1")) => {}
        Some((n, other)) => return Err(err(n, format!("expected header `coneprog 1`, found `{other}`"))),
        None => return Err(err(0, "empty input")),
    }

    let (size_line, size) = lines.next().ok_or_else(|| err(0, "missing `size` line"))?;
    let fields: Vec<&str> = size.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "size" {
        return Err(err(size_line, "expected `size <rows> <cols>`"));
    }
    let rows = parse_index(fields[1], size_line, "rows")?;
    let cols = parse_index(fields[2], size_line, "cols")?;
    if rows > MAX_DUMP_DIM || cols > MAX_DUMP_DIM {
        return Err(err(size_line, format!("dimensions exceed {MAX_DUMP_DIM}")));
    }

    let mut program = ConeProgram {
        c: vec![0.0; cols],
        a: SparseMatrix::new(rows, cols),
        b: vec![0.0; rows],
        cones: Vec::new(),
    };

    for (n, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["cone", kind, d] => {
                let d = parse_index(d, n, "cone dimension")?;
                program.cones.push(match *kind {
                    "zero" => Cone::Zero(d),
                    "nonneg" => Cone::NonNeg(d),
                    "soc" => Cone::SecondOrder(d),
                    other => return Err(err(n, format!("unknown cone kind `{other}`"))),
                });
            }
            ["c", j, v] => {
                let j = parse_index(j, n, "column")?;
                if j >= cols {
                    return Err(err(n, format!("column {j} out of range")));
                }
                program.c[j] = parse_value(v, n)?;
            }
            ["b", i, v] => {
                let i = parse_index(i, n, "row")?;
                if i >= rows {
                    return Err(err(n, format!("row {i} out of range")));
                }
                program.b[i] = parse_value(v, n)?;
            }
            ["a", i, j, v] => {
                let i = parse_index(i, n, "row")?;
                let j = parse_index(j, n, "column")?;
                if i >= rows || j >= cols {
                    return Err(err(n, format!("entry ({i}, {j}) out of range")));
                }
                program.a.entries.push((i, j, parse_value(v, n)?));
            }
            _ => return Err(err(n, format!("unrecognized line `{line}`"))),
        }
    }

    let cone_rows = program
        .cones
        .iter()
        .try_fold(0usize, |acc, c| acc.checked_add(c.dim()));
    if cone_rows != Some(rows) {
        return Err(err(0, format!("cone dimensions do not add up to {rows} rows")));
    }
    Ok(program)
}

fn parse_index(s: &str, line: usize, what: &str) -> Result<usize, DumpError> {
    s.parse()
        .map_err(|_| err(line, format!("invalid {what} `{s}`")))
}

fn parse_value(s: &str, line: usize) -> Result<f64, DumpError> {
    s.parse()
        .map_err(|_| err(line, format!("invalid number `{s}`")))
}

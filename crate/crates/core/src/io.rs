//! Plain-text matrix files.
//!
//! ```text
//! # optional comment lines
//! maxtimes 2 exact
//! 0   2
//! 1/4 .
//! ```
//!
//! The header names the domain (`maxtimes`/`max-times` or
//! `maxplus`/`max-plus`), the size and the mode (`exact` or `float`). The
//! semiring zero is written `.` in max-times and `-inf` in max-plus.

use crate::error::{Error, Result};
use crate::matrix::MaxMatrix;
use crate::scalar::{Domain, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub domain: Domain,
    pub n: usize,
    pub mode: Mode,
}

/// A raw token with its 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub token: String,
    pub line: usize,
    pub col: usize,
}

/// A parsed file whose entries are still tokens, so that the carrier can
/// be chosen after reading the header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub header: Header,
    pub rows: Vec<Vec<Cell>>,
}

fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(move |(s, t)| (line[..s].chars().count() + 1, t))
}

fn parse_err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "missing header line"))?;
    let head: Vec<(usize, &str)> = tokens(htext).collect();
    if head.len() != 3 {
        return Err(parse_err(
            hline,
            1,
            "header must be `<domain> <n> <mode>`",
        ));
    }
    let domain = match head[0].1 {
        "maxtimes" | "max-times" => Domain::MaxTimes,
        "maxplus" | "max-plus" => Domain::MaxPlus,
        other => return Err(parse_err(hline, head[0].0, format!("unknown domain `{other}`"))),
    };
    let n: usize = head[1]
        .1
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| parse_err(hline, head[1].0, "size must be a positive integer"))?;
    let mode = match head[2].1 {
        "exact" => Mode::Exact,
        "float" => Mode::Float,
        other => return Err(parse_err(hline, head[2].0, format!("unknown mode `{other}`"))),
    };
    let mut rows = Vec::with_capacity(n);
    for (lno, ltext) in lines {
        if rows.len() == n {
            return Err(parse_err(lno, 1, format!("more than {n} rows")));
        }
        let row: Vec<Cell> = tokens(ltext)
            .map(|(col, t)| Cell {
                token: t.to_string(),
                line: lno,
                col,
            })
            .collect();
        if row.len() != n {
            let col = row.get(n).map_or(ltext.chars().count() + 1, |c| c.col);
            return Err(parse_err(
                lno,
                col,
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != n {
        let last = text.lines().count().max(1);
        return Err(parse_err(last, 1, format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(MatrixFile {
        header: Header { domain, n, mode },
        rows,
    })
}

impl MatrixFile {
    /// Parses the entries into the carrier `S`, which must live in the
    /// declared domain.
    pub fn matrix<S: Scalar>(&self) -> Result<MaxMatrix<S>> {
        if S::DOMAIN != self.header.domain {
            return Err(Error::InvalidArgument(format!(
                "file is in the {} domain",
                self.header.domain.name()
            )));
        }
        self.map_cells(|t| S::parse_token(t)).and_then(MaxMatrix::from_rows)
    }

    /// Parses the entries with an arbitrary token parser, keeping error
    /// positions.
    pub fn map_cells<T>(&self, mut f: impl FnMut(&str) -> std::result::Result<T, String>) -> Result<Vec<Vec<T>>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| f(&c.token).map_err(|msg| parse_err(c.line, c.col, msg)))
                    .collect()
            })
            .collect()
    }
}

/// Reads a matrix in carrier `S` from text.
pub fn parse_matrix<S: Scalar>(text: &str) -> Result<MaxMatrix<S>> {
    parse_matrix_file(text)?.matrix()
}

/// Writes a matrix in the file format, columns aligned.
pub fn serialize_matrix<S: Scalar>(m: &MaxMatrix<S>) -> String {
    let mode = if S::EXACT { Mode::Exact } else { Mode::Float };
    let cells: Vec<Vec<String>> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(Scalar::to_token).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut out = format!("{} {} {}\n", S::DOMAIN.name(), m.n(), mode.name());
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:<width$}")).collect();
        out.push_str(line.join(" ").trim_end());
        out.push('\n');
    }
    out
}

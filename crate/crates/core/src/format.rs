//! Plain-text matrix and graph files.
//!
//! Matrix file: a header line `rows cols`, then one line per row of
//! space-separated reals in shortest round-trip form. Graph file: a header
//! line `n m`, then `m` lines `u v` with `0 <= u < v < n`, sorted
//! lexicographically. LF line endings, UTF-8, trailing newline.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::DenseMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Numbered non-empty lines; a trailing `\r` is rejected as non-LF input.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_header(line: Option<(usize, &str)>) -> Result<(usize, usize, usize)> {
    let (no, text) = line.ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = text.split_ascii_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(no, "header must hold exactly two integers"));
    }
    let a = fields[0]
        .parse()
        .map_err(|_| parse_err(no, format!("bad integer {:?}", fields[0])))?;
    let b = fields[1]
        .parse()
        .map_err(|_| parse_err(no, format!("bad integer {:?}", fields[1])))?;
    Ok((no, a, b))
}

pub fn serialize_matrix(m: &DenseMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 12);
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            // `Display` for f64 prints the shortest string that parses back
            // to the same value.
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    if text.contains('\r') {
        return Err(parse_err(1, "CR line endings are not accepted"));
    }
    let mut it = lines(text);
    let (header_line, rows, cols) = parse_header(it.next())?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(header_line, "dimensions must be positive"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (no, line) in it {
        seen += 1;
        if seen > rows {
            return Err(parse_err(no, format!("more than {rows} rows")));
        }
        let before = data.len();
        for tok in line.split_ascii_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(no, format!("bad number {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(no, format!("non-finite entry {tok:?}")));
            }
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                no,
                format!("expected {cols} entries, found {}", data.len() - before),
            ));
        }
    }
    if seen != rows {
        return Err(parse_err(
            header_line,
            format!("expected {rows} rows, found {seen}"),
        ));
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parses a graph file. Edges must be canonical: `u < v`, sorted, unique.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.contains('\r') {
        return Err(parse_err(1, "CR line endings are not accepted"));
    }
    let mut it = lines(text);
    let (header_line, n, m) = parse_header(it.next())?;
    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for (no, line) in it {
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(no, "edge line must hold two vertices"));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(no, format!("bad vertex {s:?}")))
        };
        let (u, v) = (parse(fields[0])?, parse(fields[1])?);
        if u >= v {
            return Err(parse_err(no, format!("edge ({u}, {v}) must satisfy u < v")));
        }
        if v >= n {
            return Err(parse_err(
                no,
                format!("vertex {v} out of range for n = {n}"),
            ));
        }
        if prev.is_some_and(|p| p >= (u, v)) {
            return Err(parse_err(no, "edges must be sorted and unique"));
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(parse_err(
            header_line,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Graph::from_edges(n, &edges)
}

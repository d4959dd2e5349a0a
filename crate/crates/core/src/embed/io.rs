use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::Embedding;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Writes `n d` followed by one `id v1 … vd` row per node. Values use the
/// shortest representation that parses back to the same float.
pub fn write_embedding<F: Scalar, W: Write>(e: &Embedding<F>, mut w: W) -> Result<()> {
    let io = |err| Error::io("<writer>", err);
    writeln!(w, "{} {}", e.n(), e.dim()).map_err(io)?;
    let mut line = String::new();
    for v in 0..e.n() {
        line.clear();
        line.push_str(&v.to_string());
        for x in e.row(v) {
            line.push(' ');
            line.push_str(&x.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn save_embedding<F: Scalar>(e: &Embedding<F>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|err| Error::io(path, err))?;
    write_embedding(e, BufWriter::new(f)).map_err(|err| match err {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

fn parse_header(tokens: &[&str]) -> Option<(usize, usize)> {
    match tokens {
        [a, b] => Some((a.parse().ok()?, b.parse().ok()?)),
        _ => None,
    }
}

/// Reads an embedding with or without the `n d` header. Rows may come in any
/// order; every id in `0..n` must appear exactly once.
pub fn read_embedding<F: Scalar, R: BufRead>(r: R) -> Result<Embedding<F>> {
    let mut lines: Vec<(usize, String)> = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line.map_err(|err| Error::io("<reader>", err))?;
        if !line.trim().is_empty() {
            lines.push((k + 1, line));
        }
    }
    if lines.is_empty() {
        return Err(Error::Empty("embedding file has no rows".into()));
    }
    let first: Vec<&str> = lines[0].1.split_whitespace().collect();
    // A two-integer first line is a header when the next row has d + 1
    // fields. With d = 1 that also fits a headerless one-dimensional file, so
    // the row count has to agree as well.
    let header = parse_header(&first).filter(|&(n, d)| {
        lines
            .get(1)
            .is_some_and(|l| l.1.split_whitespace().count() == d + 1)
            && (d != 1 || lines.len() - 1 == n)
    });
    let rows = if header.is_some() { &lines[1..] } else { &lines[..] };
    let d = match header {
        Some((_, d)) => d,
        None => first.len().saturating_sub(1),
    };
    if d == 0 {
        return Err(Error::Parse {
            line: lines[0].0,
            msg: "row has no coordinates".into(),
        });
    }

    let mut parsed: Vec<(usize, usize, Vec<F>)> = Vec::with_capacity(rows.len());
    for (line_no, line) in rows {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != d + 1 {
            return Err(Error::RowLength {
                row: *line_no,
                expected: d,
                found: tokens.len() - 1,
            });
        }
        let id: usize = tokens[0].parse().map_err(|_| Error::Parse {
            line: *line_no,
            msg: format!("bad node id {:?}", tokens[0]),
        })?;
        let vals = tokens[1..]
            .iter()
            .map(|t| {
                t.parse::<F>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::Parse {
                    line: *line_no,
                    msg: format!("bad coordinate {t:?}"),
                })
            })
            .collect::<Result<Vec<F>>>()?;
        parsed.push((*line_no, id, vals));
    }

    let n = match header {
        Some((n, _)) => n,
        None => parsed.iter().map(|r| r.1).max().map_or(0, |m| m + 1),
    };
    let mut coords = vec![F::zero(); n * d];
    let mut seen = vec![false; n];
    for (line_no, id, vals) in parsed {
        if id >= n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("node id {id} out of range for n = {n}"),
            });
        }
        if seen[id] {
            return Err(Error::DuplicateId { row: line_no, id });
        }
        seen[id] = true;
        coords[id * d..(id + 1) * d].copy_from_slice(&vals);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::MissingId(missing));
    }
    Embedding::new(n, d, coords)
}

pub fn load_embedding<F: Scalar>(path: impl AsRef<Path>) -> Result<Embedding<F>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|err| Error::io(path, err))?;
    read_embedding(BufReader::new(f))
}

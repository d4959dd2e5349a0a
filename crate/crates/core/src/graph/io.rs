use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::{DropCounts, Graph, Partition};
use crate::error::{Error, Result};

/// A graph read from disk together with the original node ids.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `ids[v]` is the id node `v` carried in the file.
    pub ids: Vec<u64>,
    pub dropped: DropCounts,
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })),
        Ok(l) => {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn parse_id(tok: Option<&str>, line: usize) -> Result<u64> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: "expected two node ids".into(),
    })?;
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        msg: format!("not a non-negative integer: {tok:?}"),
    })
}

/// Parse a whitespace-separated edge list. Extra columns (weights) are
/// ignored; ids are compacted to `0..n` in ascending order.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut raw = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let mut toks = text.split_whitespace();
        let u = parse_id(toks.next(), line)?;
        let v = parse_id(toks.next(), line)?;
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::Empty("edge list has no edges".into()));
    }
    let mut index: BTreeMap<u64, usize> = BTreeMap::new();
    for &(u, v) in &raw {
        index.insert(u, 0);
        index.insert(v, 0);
    }
    let mut ids = Vec::with_capacity(index.len());
    for (i, (k, slot)) in index.iter_mut().enumerate() {
        *slot = i;
        ids.push(*k);
    }
    let (graph, dropped) =
        Graph::from_edges_counted(ids.len(), raw.iter().map(|(u, v)| (index[u], index[v])))?;
    if dropped.duplicates + dropped.self_loops > 0 {
        warn!(
            "edge list: dropped {} duplicate edge(s) and {} self-loop(s)",
            dropped.duplicates, dropped.self_loops
        );
    }
    Ok(LoadedGraph { graph, ids, dropped })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edge_list(BufReader::new(f))
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_edge_list(g, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_partition<W: Write>(p: &Partition, mut w: W) -> std::io::Result<()> {
    for (v, l) in p.labels().iter().enumerate() {
        writeln!(w, "{v} {l}")?;
    }
    Ok(())
}

pub fn save_partition(p: &Partition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_partition(p, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Parse `node_id community_id` lines for nodes `0..n`. Label gaps are
/// compacted with a warning.
pub fn read_partition<R: BufRead>(reader: R, n: usize) -> Result<Partition> {
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut rows = 0usize;
    for item in data_lines(reader) {
        let (line, text) = item?;
        let mut toks = text.split_whitespace();
        let v = parse_id(toks.next(), line)? as usize;
        let c = parse_id(toks.next(), line)? as usize;
        rows += 1;
        if v >= n {
            return Err(Error::NodeCountMismatch {
                expected: n,
                found: v + 1,
            });
        }
        if labels[v].replace(c).is_some() {
            return Err(Error::DuplicateId { row: line, id: v });
        }
    }
    if rows != n {
        return Err(Error::NodeCountMismatch {
            expected: n,
            found: rows,
        });
    }
    let raw: Vec<usize> = labels.into_iter().map(|l| l.expect("all rows seen")).collect();
    let (p, compacted) = Partition::from_labels(&raw)?;
    if compacted {
        warn!("partition labels compacted to 0..{}", p.ell());
    }
    Ok(p)
}

pub fn load_partition(path: impl AsRef<Path>, n: usize) -> Result<Partition> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_partition(BufReader::new(f), n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<LoadedGraph> {
        read_edge_list(s.as_bytes())
    }

    #[test]
    fn triangle_file() {
        let lg = parse("# comment\n0 1\n1 2\n\n2 0\n").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (3, 3));
    }

    #[test]
    fn duplicates_and_loops_counted() {
        let lg = parse("0 1\n0 1\n1 1\n").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (2, 1));
        assert_eq!(lg.dropped.duplicates, 1);
        assert_eq!(lg.dropped.self_loops, 1);
    }

    #[test]
    fn ids_compacted_and_weights_ignored() {
        let lg = parse("10 30 0.5\n30 20 7\n").unwrap();
        assert_eq!(lg.ids, vec![10, 20, 30]);
        assert!(lg.graph.has_edge(0, 2) && lg.graph.has_edge(1, 2));
    }

    #[test]
    fn malformed_line_reports_number() {
        match parse("0 1\n# c\n2 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("5\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("-1 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_file_is_error() {
        assert!(matches!(parse("# nothing\n"), Err(Error::Empty(_))));
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4), (0, 4)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap().graph;
        assert_eq!(back, g);
    }

    #[test]
    fn partition_round_trip_and_compaction() {
        let p = Partition::new(vec![0, 0, 1]).unwrap();
        let mut buf = Vec::new();
        write_partition(&p, &mut buf).unwrap();
        assert_eq!(read_partition(buf.as_slice(), 3).unwrap(), p);

        let q = read_partition("0 5\n1 9\n2 5\n".as_bytes(), 3).unwrap();
        assert_eq!(q.labels(), &[0, 1, 0]);
    }

    #[test]
    fn partition_count_mismatch() {
        assert!(matches!(
            read_partition("0 0\n1 0\n".as_bytes(), 3),
            Err(Error::NodeCountMismatch { .. })
        ));
        assert!(matches!(
            read_partition("0 0\n3 0\n".as_bytes(), 2),
            Err(Error::NodeCountMismatch { .. })
        ));
        assert!(matches!(
            read_partition("0 0\n0 1\n".as_bytes(), 2),
            Err(Error::DuplicateId { .. })
        ));
    }
}

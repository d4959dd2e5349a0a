//! Undirected simple graphs, partitions, and their file formats.

mod io;
mod partition;
mod stats;

pub use io::{
    load_edge_list, load_partition, read_edge_list, read_partition, save_edge_list,
    save_partition, write_edge_list, write_partition, LoadedGraph,
};
pub use partition::Partition;
pub use stats::{
    connected_components, core_numbers, graph_stats, triangle_count, GraphStats,
};

use crate::error::{Error, Result};

/// Counts of input edges discarded while building a simple graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Undirected simple graph on nodes `0..n` in compressed sparse row form.
///
/// Neighbor lists are sorted ascending, symmetric, and free of self-loops
/// and repeats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Build a simple graph, silently discarding self-loops and repeated edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_counted(n, edges).map(|(g, _)| g)
    }

    /// Build a simple graph and report how many input edges were dropped.
    pub fn from_edges_counted<I>(n: usize, edges: I) -> Result<(Self, DropCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::Empty("graph with zero nodes".into()));
        }
        let mut drops = DropCounts::default();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u == v {
                drops.self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        drops.duplicates = before - pairs.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; 2 * pairs.len()];
        // Smaller partners first, then larger; each pass is ascending.
        for &(u, v) in &pairs {
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in &pairs {
            targets[cursor[u]] = v;
            cursor[u] += 1;
        }
        let g = Graph { offsets, targets };
        debug_assert!(g.check_invariants().is_ok());
        Ok((g, drops))
    }

    /// Number of nodes.
    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each edge once as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Verify simplicity, symmetry, sortedness, and the handshake identity.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n();
        let mut degree_sum = 0;
        for v in 0..n {
            let nb = self.neighbors(v);
            degree_sum += nb.len();
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!("adjacency of {v} not strictly sorted")));
                }
            }
            for &u in nb {
                if u == v {
                    return Err(Error::invalid(format!("self-loop at {v}")));
                }
                if u >= n || !self.has_edge(u, v) {
                    return Err(Error::invalid(format!("asymmetric edge {v} -> {u}")));
                }
            }
        }
        if degree_sum != 2 * self.m() {
            return Err(Error::invalid("degree sum differs from 2m"));
        }
        Ok(())
    }

    /// Copy of the graph with the given edges removed.
    pub fn without_edges(&self, removed: &[(usize, usize)]) -> Graph {
        let mut drop: Vec<(usize, usize)> =
            removed.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        drop.sort_unstable();
        let kept = self
            .edges()
            .filter(|e| drop.binary_search(e).is_err())
            .collect::<Vec<_>>();
        Graph::from_edges(self.n(), kept).expect("subgraph of a valid graph")
    }

    /// Image of the graph under the node relabeling `v -> perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        Graph::from_edges(self.n(), self.edges().map(|(u, v)| (perm[u], perm[v])))
            .expect("relabeling of a valid graph")
    }
}

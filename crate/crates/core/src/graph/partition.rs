use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Hard assignment of nodes `0..n` to communities `0..ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Build from labels already in `0..ell` with every community non-empty.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("partition over zero nodes".into()));
        }
        let ell = labels.iter().max().unwrap() + 1;
        let mut sizes = vec![0usize; ell];
        for &l in &labels {
            sizes[l] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::invalid(format!("community {c} is empty")));
        }
        Ok(Partition { labels, sizes })
    }

    /// Build from arbitrary labels, compacting them to `0..ell` in ascending
    /// order of the original values. Returns whether any gap was closed.
    pub fn from_labels(raw: &[usize]) -> Result<(Self, bool)> {
        let mut map = BTreeMap::new();
        for &l in raw {
            map.entry(l).or_insert(0usize);
        }
        let mut compacted = false;
        for (i, (k, v)) in map.iter_mut().enumerate() {
            *v = i;
            compacted |= *k != i;
        }
        let labels = raw.iter().map(|l| map[l]).collect();
        Ok((Partition::new(labels)?, compacted))
    }

    /// Relabel communities in order of first appearance over nodes `0..n`.
    pub fn canonical(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let relabeled = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition::new(relabeled).expect("canonical labels are contiguous")
    }

    pub fn single(n: usize) -> Self {
        Partition::new(vec![0; n]).expect("n >= 1")
    }

    pub fn singletons(n: usize) -> Self {
        Partition::new((0..n).collect()).expect("n >= 1")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of communities.
    #[inline]
    pub fn ell(&self) -> usize {
        self.sizes.len()
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Node lists per community, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }

    /// True if both partitions group the nodes identically.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.n() == other.n()
            && Partition::canonical(&self.labels).labels
                == Partition::canonical(&other.labels).labels
    }
}

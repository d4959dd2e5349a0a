//! Two-phase Louvain modularity optimization.
//!
//! Internally every level relabels nodes by their position in the visiting
//! order, so the outcome depends only on the graph and the order, never on
//! the input labels. Ties in gain go to the lowest (internal) community id.

use rand::seq::SliceRandom;

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::seed::Rng;

const MAX_SWEEPS: usize = 1000;

/// One aggregation level: a weighted graph with self-loop weights.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    /// Twice the total edge weight.
    two_w: f64,
}

impl Level {
    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Relabel node `order[k]` to `k`.
    fn from_weighted(g: &WeightedGraph<'_>, order: &[usize]) -> Level {
        let n = order.len();
        let mut rank = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        let src = g.adjacency();
        let mut adj = vec![Vec::new(); n];
        for (v, list) in src.into_iter().enumerate() {
            let mut mapped: Vec<(usize, f64)> = list.into_iter().map(|(u, w)| (rank[u], w)).collect();
            mapped.sort_unstable_by_key(|e| e.0);
            adj[rank[v]] = mapped;
        }
        Level::finish(adj, vec![0.0; n])
    }

    fn finish(adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Level {
        let strength: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(a, s)| a.iter().map(|e| e.1).sum::<f64>() + 2.0 * s)
            .collect();
        let two_w = strength.iter().sum();
        Level {
            adj,
            self_loop,
            strength,
            two_w,
        }
    }

    /// Collapse communities (ids `0..k`) into nodes.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut self_loop = vec![0.0; k];
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for v in 0..self.n() {
            let cv = comm[v];
            self_loop[cv] += self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                let cu = comm[u];
                if cu == cv {
                    // each internal edge is seen from both ends
                    self_loop[cv] += 0.5 * w;
                } else {
                    *maps[cv].entry(cu).or_insert(0.0) += w;
                }
            }
        }
        let adj = maps.into_iter().map(|m| m.into_iter().collect()).collect();
        Level::finish(adj, self_loop)
    }

    /// Local moving phase starting from singletons. Returns community ids
    /// renumbered `0..k` by smallest member, and whether anything moved.
    fn local_moves(&self, visit: &[usize]) -> (Vec<usize>, usize, bool) {
        let n = self.n();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot: Vec<f64> = self.strength.clone();
        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut moved_any = false;
        let eps = 1e-12 * self.two_w.max(1.0);

        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for &v in visit {
                let kv = self.strength[v];
                let cv = comm[v];
                touched.clear();
                for &(u, w) in &self.adj[v] {
                    let cu = comm[u];
                    if link[cu] == 0.0 {
                        touched.push(cu);
                    }
                    link[cu] += w;
                }
                tot[cv] -= kv;
                let gain = |c: usize, link: &[f64]| link[c] - kv * tot[c] / self.two_w;
                let stay = gain(cv, &link);
                let mut best = cv;
                let mut best_gain = f64::NEG_INFINITY;
                for &c in touched.iter().filter(|&&c| c != cv) {
                    let g = gain(c, &link);
                    if g > best_gain + eps || ((g - best_gain).abs() <= eps && c < best) {
                        best = c;
                        best_gain = g;
                    }
                }
                // strict improvement only
                if best_gain <= stay + eps {
                    best = cv;
                }
                tot[best] += kv;
                for &c in &touched {
                    link[c] = 0.0;
                }
                if best != cv {
                    comm[v] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }

        let mut remap = vec![usize::MAX; n];
        let mut k = 0;
        for c in comm.iter_mut() {
            if remap[*c] == usize::MAX {
                remap[*c] = k;
                k += 1;
            }
            *c = remap[*c];
        }
        (comm, k, moved_any)
    }
}

fn check(g: &WeightedGraph<'_>, order: &[usize]) -> Result<()> {
    if g.graph().m() == 0 {
        return Err(Error::invalid("louvain needs at least one edge"));
    }
    let n = g.graph().n();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::invalid("visiting order is not a permutation of the nodes"));
    }
    Ok(())
}

fn to_partition(order: &[usize], internal: &[usize]) -> Partition {
    let mut labels = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        labels[v] = internal[k];
    }
    Partition::canonical(&labels)
}

/// Full multi-level Louvain with a shuffled first-level order.
pub fn louvain(g: &WeightedGraph<'_>, rng: &mut Rng) -> Result<Partition> {
    let mut order: Vec<usize> = (0..g.graph().n()).collect();
    order.shuffle(rng);
    louvain_with_order(g, &order, rng)
}

/// Full multi-level Louvain visiting first-level nodes in `order`; `rng`
/// shuffles the visiting order of the aggregated levels.
pub fn louvain_with_order(g: &WeightedGraph<'_>, order: &[usize], rng: &mut Rng) -> Result<Partition> {
    check(g, order)?;
    let mut level = Level::from_weighted(g, order);
    // membership of each internal first-level node in the current level's nodes
    let mut membership: Vec<usize> = (0..level.n()).collect();
    let mut visit: Vec<usize> = (0..level.n()).collect();
    loop {
        let (comm, k, moved) = level.local_moves(&visit);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        level = level.aggregate(&comm, k);
        visit = (0..k).collect();
        visit.shuffle(rng);
    }
    Ok(to_partition(order, &membership))
}

/// Only the first local-moving phase (no aggregation).
pub fn louvain_single_level(g: &WeightedGraph<'_>, order: &[usize]) -> Result<Partition> {
    check(g, order)?;
    let level = Level::from_weighted(g, order);
    let visit: Vec<usize> = (0..level.n()).collect();
    let (comm, _, _) = level.local_moves(&visit);
    Ok(to_partition(order, &comm))
}

//! Ensemble Clustering for Graphs: reweight edges by how often an ensemble
//! of single-level Louvain runs co-clusters their endpoints, then run full
//! Louvain on the reweighted graph.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::louvain::{louvain_single_level, louvain_with_order};
use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::graph::{core_numbers, Graph, Partition};
use crate::seed::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcgParams {
    /// Number of single-level Louvain runs.
    pub ensemble: usize,
    /// Weight floor, also the weight of edges outside the 2-core.
    pub w_min: f64,
}

impl Default for EcgParams {
    fn default() -> Self {
        EcgParams {
            ensemble: 16,
            w_min: 0.05,
        }
    }
}

/// ECG with visiting orders drawn from `rng`.
pub fn ecg(g: &Graph, params: &EcgParams, rng: &mut Rng) -> Result<Partition> {
    let n = g.n();
    let orders: Vec<Vec<usize>> = (0..params.ensemble)
        .map(|_| {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    let mut last: Vec<usize> = (0..n).collect();
    last.shuffle(rng);
    ecg_with_orders(g, params, &orders, &last, rng)
}

/// ECG weights from explicit ensemble orders.
pub fn ecg_weights(g: &Graph, params: &EcgParams, orders: &[Vec<usize>]) -> Result<Vec<f64>> {
    if g.m() == 0 {
        return Err(Error::invalid("ecg needs at least one edge"));
    }
    if orders.is_empty() || !(0.0 < params.w_min && params.w_min <= 1.0) {
        return Err(Error::invalid("ecg needs k >= 1 and w_min in (0, 1]"));
    }
    let unweighted = WeightedGraph::unweighted(g);
    let runs: Vec<Partition> = orders
        .par_iter()
        .map(|o| louvain_single_level(&unweighted, o))
        .collect::<Result<_>>()?;
    let core = core_numbers(g);
    let k = orders.len() as f64;
    Ok(g.edges()
        .map(|(u, v)| {
            if core[u] < 2 || core[v] < 2 {
                return params.w_min;
            }
            let together = runs.iter().filter(|p| p.label(u) == p.label(v)).count() as f64;
            params.w_min + (1.0 - params.w_min) * together / k
        })
        .collect())
}

/// ECG with explicit ensemble orders and final-level order. Relabeling the
/// graph and mapping every order through the same permutation relabels the
/// result identically.
pub fn ecg_with_orders(
    g: &Graph,
    params: &EcgParams,
    orders: &[Vec<usize>],
    final_order: &[usize],
    rng: &mut Rng,
) -> Result<Partition> {
    let weights = ecg_weights(g, params, orders)?;
    let wg = WeightedGraph::new(g, weights)?;
    louvain_with_order(&wg, final_order, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn bridged_k5() -> Graph {
        let mut e = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    e.push((base + i, base + j));
                }
            }
        }
        e.push((4, 5));
        Graph::from_edges(10, e).unwrap()
    }

    #[test]
    fn k1_recovers_cliques() {
        let g = bridged_k5();
        let params = EcgParams { ensemble: 1, ..Default::default() };
        let want = Partition::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]).unwrap();
        for s in 0..10 {
            let p = ecg(&g, &params, &mut rng_from_seed(s)).unwrap();
            assert!(p.same_grouping(&want));
        }
    }

    #[test]
    fn bridge_gets_floor_weight_when_never_co_clustered() {
        let g = bridged_k5();
        let orders: Vec<Vec<usize>> = (0..4).map(|s| {
            let mut o: Vec<usize> = (0..10).collect();
            o.shuffle(&mut rng_from_seed(s));
            o
        }).collect();
        let w = ecg_weights(&g, &EcgParams::default(), &orders).unwrap();
        let bridge = g.edges().position(|e| e == (4, 5)).unwrap();
        assert!((w[bridge] - 0.05).abs() < 1e-15);
        for (i, wi) in w.iter().enumerate() {
            if i != bridge {
                assert!((wi - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tree_edges_get_floor_weight() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = ecg_weights(&g, &EcgParams::default(), &[vec![0, 1, 2, 3]]).unwrap();
        assert!(w.iter().all(|&x| x == 0.05));
    }

    #[test]
    fn deterministic() {
        let g = bridged_k5();
        let a = ecg(&g, &EcgParams::default(), &mut rng_from_seed(4)).unwrap();
        let b = ecg(&g, &EcgParams::default(), &mut rng_from_seed(4)).unwrap();
        assert_eq!(a, b);
    }
}

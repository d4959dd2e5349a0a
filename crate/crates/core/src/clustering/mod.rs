//! Modularity-based graph clustering: Louvain and the ECG consensus wrapper.

mod ecg;
mod louvain;

pub use ecg::{ecg, ecg_weights, ecg_with_orders, EcgParams};
pub use louvain::{louvain, louvain_single_level, louvain_with_order};

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::seed::rng_from_seed;

/// A graph with one positive weight per edge, aligned with [`Graph::edges`].
#[derive(Clone, Debug)]
pub struct WeightedGraph<'a> {
    graph: &'a Graph,
    weights: Vec<f64>,
}

impl<'a> WeightedGraph<'a> {
    pub fn unweighted(graph: &'a Graph) -> Self {
        WeightedGraph {
            graph,
            weights: vec![1.0; graph.m()],
        }
    }

    pub fn new(graph: &'a Graph, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != graph.m() {
            return Err(Error::LengthMismatch(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.m()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("edge weight {w} is not positive")));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Per-node weighted adjacency `(neighbor, weight)`, neighbors ascending.
    pub(crate) fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj: Vec<Vec<(usize, f64)>> =
            (0..self.graph.n()).map(|v| Vec::with_capacity(self.graph.degree(v))).collect();
        for ((u, v), &w) in self.graph.edges().zip(&self.weights) {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for a in adj.iter_mut() {
            a.sort_unstable_by_key(|e| e.0);
        }
        adj
    }
}

/// Newman modularity `Σ_c [W_c / W - (vol_c / 2W)^2]`.
pub fn modularity(g: &WeightedGraph<'_>, p: &Partition) -> Result<f64> {
    if g.graph.m() == 0 {
        return Err(Error::invalid("modularity is undefined without edges"));
    }
    if p.n() != g.graph.n() {
        return Err(Error::NodeCountMismatch {
            expected: g.graph.n(),
            found: p.n(),
        });
    }
    let total = g.total_weight();
    let mut inside = vec![0.0f64; p.ell()];
    let mut vol = vec![0.0f64; p.ell()];
    for ((u, v), &w) in g.graph.edges().zip(&g.weights) {
        let (a, b) = (p.label(u), p.label(v));
        if a == b {
            inside[a] += w;
        }
        vol[a] += w;
        vol[b] += w;
    }
    Ok(inside
        .iter()
        .zip(&vol)
        .map(|(wc, vc)| wc / total - (vc / (2.0 * total)).powi(2))
        .sum())
}

/// Step-1 clustering choice for the divergence pipeline.
#[derive(Clone, Debug)]
pub enum Clusterer {
    Ecg(EcgParams),
    Louvain,
    /// A user-supplied partition, used as is.
    Fixed(Partition),
}

impl Default for Clusterer {
    fn default() -> Self {
        Clusterer::Ecg(EcgParams::default())
    }
}

impl Clusterer {
    pub fn id(&self) -> &'static str {
        match self {
            Clusterer::Ecg(_) => "ecg",
            Clusterer::Louvain => "louvain",
            Clusterer::Fixed(_) => "file",
        }
    }

    pub fn cluster(&self, g: &Graph, seed: u64) -> Result<Partition> {
        let mut rng = rng_from_seed(seed);
        match self {
            Clusterer::Ecg(p) => ecg(g, p, &mut rng),
            Clusterer::Louvain => louvain(&WeightedGraph::unweighted(g), &mut rng),
            Clusterer::Fixed(p) => {
                if p.n() != g.n() {
                    return Err(Error::NodeCountMismatch {
                        expected: g.n(),
                        found: p.n(),
                    });
                }
                Ok(p.clone())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn single_community_has_zero_modularity() {
        let g = two_triangles();
        let q = modularity(&WeightedGraph::unweighted(&g), &Partition::single(6)).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn disjoint_triangles_split_gives_half() {
        let g = two_triangles();
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let q = modularity(&WeightedGraph::unweighted(&g), &p).unwrap();
        assert!((q - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_validated() {
        let g = two_triangles();
        assert!(WeightedGraph::new(&g, vec![1.0; 5]).is_err());
        assert!(WeightedGraph::new(&g, vec![0.0; 6]).is_err());
        let empty = Graph::from_edges(3, []).unwrap();
        assert!(modularity(&WeightedGraph::unweighted(&empty), &Partition::single(3)).is_err());
    }
}

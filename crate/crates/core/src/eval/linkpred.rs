use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng as _;

use super::metrics::auc;
use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seed::stream;

/// Held-out edges, an equal number of sampled non-edges, and the graph left
/// after removing the held-out edges.
#[derive(Clone, Debug)]
pub struct LinkSplit {
    pub train: Graph,
    pub positives: Vec<(usize, usize)>,
    pub negatives: Vec<(usize, usize)>,
}

pub fn link_prediction_split(g: &Graph, holdout: f64, seed: u64) -> Result<LinkSplit> {
    if g.m() < 10 {
        return Err(Error::invalid(format!("need at least 10 edges, got {}", g.m())));
    }
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::invalid("holdout must be in (0, 1)"));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let k = ((holdout * edges.len() as f64).round() as usize).max(1);
    let n = g.n();
    let available = n * (n - 1) / 2 - g.m();
    if available < k {
        return Err(Error::NotEnoughNonEdges { needed: k, available });
    }
    let mut rng = stream(seed, &[0]);
    let mut positives: Vec<(usize, usize)> = sample(&mut rng, edges.len(), k)
        .into_iter()
        .map(|i| edges[i])
        .collect();
    positives.sort_unstable();

    let mut rng = stream(seed, &[1]);
    let mut seen = HashSet::with_capacity(k);
    let mut negatives = Vec::with_capacity(k);
    while negatives.len() < k {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        let pair = (u.min(v), u.max(v));
        if u != v && !g.has_edge(u, v) && seen.insert(pair) {
            negatives.push(pair);
        }
    }
    Ok(LinkSplit {
        train: g.without_edges(&positives),
        positives,
        negatives,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkScores {
    pub auc: f64,
    pub accuracy: f64,
}

/// Scores each pair by `1 − d/d_max` (with `d_max` over the evaluated pairs)
/// and reports AUC plus accuracy at threshold 0.5.
pub fn score_link_prediction<F: Scalar>(emb: &Embedding<F>, split: &LinkSplit) -> Result<LinkScores> {
    if emb.n() != split.train.n() {
        return Err(Error::NodeCountMismatch {
            expected: split.train.n(),
            found: emb.n(),
        });
    }
    let dist = |pairs: &[(usize, usize)]| -> Vec<f64> {
        pairs.iter().map(|&(u, v)| emb.distance(u, v).as_f64()).collect()
    };
    let (dp, dn) = (dist(&split.positives), dist(&split.negatives));
    let dmax = dp.iter().chain(&dn).fold(0.0f64, |a, &b| a.max(b));
    let score = |d: &[f64]| -> Vec<f64> {
        d.iter().map(|&x| if dmax > 0.0 { 1.0 - x / dmax } else { 1.0 }).collect()
    };
    let (sp, sn) = (score(&dp), score(&dn));
    let hits = sp.iter().filter(|&&s| s >= 0.5).count() + sn.iter().filter(|&&s| s < 0.5).count();
    Ok(LinkScores {
        auc: auc(&sp, &sn)?,
        accuracy: hits as f64 / (sp.len() + sn.len()) as f64,
    })
}

pub struct LinkPredOutcome<F> {
    pub scores: LinkScores,
    pub split: LinkSplit,
    pub embedding: Embedding<F>,
}

/// Hold out edges, embed what remains with `embed`, score the held-out pairs.
pub fn link_prediction_experiment<F, E>(g: &Graph, holdout: f64, seed: u64, embed: E) -> Result<LinkPredOutcome<F>>
where
    F: Scalar,
    E: FnOnce(&Graph) -> Result<Embedding<F>>,
{
    let split = link_prediction_split(g, holdout, seed)?;
    let embedding = embed(&split.train)?;
    let scores = score_link_prediction(&embedding, &split)?;
    Ok(LinkPredOutcome {
        scores,
        split,
        embedding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    #[test]
    fn split_shapes() {
        let g = ring(50);
        let s = link_prediction_split(&g, 0.1, 4).unwrap();
        assert_eq!(s.positives.len(), 5);
        assert_eq!(s.negatives.len(), 5);
        assert_eq!(s.train.m(), 45);
        assert!(s.positives.iter().all(|&(u, v)| g.has_edge(u, v) && !s.train.has_edge(u, v)));
        assert!(s.negatives.iter().all(|&(u, v)| u < v && !g.has_edge(u, v)));
    }

    #[test]
    fn split_errors() {
        assert!(link_prediction_split(&ring(5), 0.1, 0).is_err());
        // K5 has no non-edges at all
        let k5: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let g = Graph::from_edges(5, k5).unwrap();
        assert!(matches!(
            link_prediction_split(&g, 0.5, 0),
            Err(Error::NotEnoughNonEdges { .. })
        ));
    }

    #[test]
    fn ring_coordinates_predict_ring_edges() {
        let n = 60;
        let g = ring(n);
        let out = link_prediction_experiment(&g, 0.2, 1, |t| {
            let coords = (0..t.n())
                .flat_map(|v| {
                    let a = v as f64 / n as f64 * std::f64::consts::TAU;
                    [a.cos(), a.sin()]
                })
                .collect();
            Embedding::<f64>::new(t.n(), 2, coords)
        })
        .unwrap();
        assert!(out.scores.auc > 0.99);
    }
}

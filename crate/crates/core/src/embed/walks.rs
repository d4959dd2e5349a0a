use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::stream;

/// Biased random-walk settings. `p = q = 1` gives uniform (DeepWalk) walks.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkParams {
    pub p: f64,
    pub q: f64,
    pub num_walks: usize,
    pub walk_length: usize,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            p: 1.0,
            q: 1.0,
            num_walks: 10,
            walk_length: 80,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite() && self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::invalid("p and q must be positive"));
        }
        if self.num_walks == 0 || self.walk_length < 2 {
            return Err(Error::invalid("need num_walks >= 1 and walk_length >= 2"));
        }
        Ok(())
    }

    fn uniform(&self) -> bool {
        self.p == 1.0 && self.q == 1.0
    }
}

/// Unnormalized weight of stepping from `v` to `x` after arriving from `t`.
#[inline]
pub fn transition_weight(g: &Graph, t: usize, x: usize, p: f64, q: f64) -> f64 {
    if x == t {
        1.0 / p
    } else if g.has_edge(t, x) {
        1.0
    } else {
        1.0 / q
    }
}

fn walk_from(g: &Graph, start: usize, params: &WalkParams, rng: &mut crate::seed::Rng) -> Vec<usize> {
    let mut walk = Vec::with_capacity(params.walk_length);
    walk.push(start);
    if g.degree(start) == 0 {
        return walk;
    }
    let (inv_p, inv_q) = (1.0 / params.p, 1.0 / params.q);
    let bound = inv_p.max(1.0).max(inv_q);
    while walk.len() < params.walk_length {
        let v = *walk.last().expect("nonempty walk");
        let nbrs = g.neighbors(v);
        let next = if walk.len() == 1 || params.uniform() {
            nbrs[rng.random_range(0..nbrs.len())]
        } else {
            // rejection sampling against the largest possible weight
            let t = walk[walk.len() - 2];
            loop {
                let x = nbrs[rng.random_range(0..nbrs.len())];
                let w = transition_weight(g, t, x, params.p, params.q);
                if w >= bound || rng.random::<f64>() * bound < w {
                    break x;
                }
            }
        };
        walk.push(next);
    }
    walk
}

/// `num_walks` rounds; each round visits every start node in a fresh random
/// order. Every walk has its own RNG stream, so the output does not depend on
/// the number of worker threads.
pub fn generate_walks(g: &Graph, params: &WalkParams, seed: u64) -> Result<Vec<Vec<usize>>> {
    params.validate()?;
    if g.m() == 0 {
        return Err(Error::Empty("graph has no edges".into()));
    }
    let mut walks = Vec::with_capacity(params.num_walks * g.n());
    for round in 0..params.num_walks {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut stream(seed, &[round as u64]));
        let batch: Vec<Vec<usize>> = order
            .par_iter()
            .map(|&v| walk_from(g, v, params, &mut stream(seed, &[round as u64, v as u64 + 1])))
            .collect();
        walks.extend(batch);
    }
    Ok(walks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_validity() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let params = WalkParams {
            num_walks: 3,
            walk_length: 7,
            p: 0.5,
            q: 2.0,
        };
        let walks = generate_walks(&g, &params, 9).unwrap();
        assert_eq!(walks.len(), 15);
        for w in &walks {
            if w[0] == 4 {
                assert_eq!(w.len(), 1);
                continue;
            }
            assert_eq!(w.len(), 7);
            assert!(w.windows(2).all(|s| g.has_edge(s[0], s[1])));
        }
        assert_eq!(walks, generate_walks(&g, &params, 9).unwrap());
        assert_ne!(walks, generate_walks(&g, &params, 10).unwrap());
    }

    #[test]
    fn rejects_bad_params() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let bad = WalkParams {
            p: 0.0,
            ..Default::default()
        };
        assert!(generate_walks(&g, &bad, 0).is_err());
        let bad = WalkParams {
            walk_length: 1,
            ..Default::default()
        };
        assert!(generate_walks(&g, &bad, 0).is_err());
        let empty = Graph::from_edges(2, Vec::new()).unwrap();
        assert!(generate_walks(&empty, &WalkParams::default(), 0).is_err());
    }

    #[test]
    fn triangle_return_probability() {
        // from (t, v) on a triangle: back to t with weight 1/p, on to the
        // common neighbour with weight 1
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = 2.0;
        let w_back = transition_weight(&g, 0, 0, p, 5.0);
        let w_on = transition_weight(&g, 0, 2, p, 5.0);
        assert!((w_back / (w_back + w_on) - 1.0 / 3.0).abs() < 1e-15);
    }
}

use rand::Rng as _;

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::scalar::{sq_dist, Scalar};
use crate::seed::rng_from_seed;

const MAX_ITER: usize = 300;

#[derive(Clone, Debug)]
pub struct KMeans<F> {
    pub partition: Partition,
    pub centroids: Vec<Vec<F>>,
    pub inertia: F,
    pub iterations: usize,
}

fn nearest<F: Scalar>(x: &[F], centroids: &[Vec<F>]) -> (usize, F) {
    let mut best = (0, F::infinity());
    for (c, mu) in centroids.iter().enumerate() {
        let d = sq_dist(x, mu);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding followed by Lloyd iterations.
pub fn kmeans<F: Scalar>(emb: &Embedding<F>, k: usize, seed: u64) -> Result<KMeans<F>> {
    let n = emb.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must be in 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut centroids: Vec<Vec<F>> = vec![emb.row(rng.random_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|v| sq_dist(emb.row(v), &centroids[0]).as_f64()).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (v, &w) in d2.iter().enumerate() {
                if t < w {
                    chosen = v;
                    break;
                }
                t -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(emb.row(pick).to_vec());
        let c = centroids.last().expect("just pushed");
        for (v, dv) in d2.iter_mut().enumerate() {
            *dv = dv.min(sq_dist(emb.row(v), c).as_f64());
        }
    }

    let d = emb.dim();
    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;
    for it in 1..=MAX_ITER {
        iterations = it;
        let mut changed = false;
        for (v, l) in labels.iter_mut().enumerate() {
            let (c, _) = nearest(emb.row(v), &centroids);
            if *l != c {
                *l = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![F::zero(); d]; k];
        let mut counts = vec![0usize; k];
        for (v, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, &x) in sums[l].iter_mut().zip(emb.row(v)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = F::one() / F::of_usize(counts[c]);
                centroids[c] = sums[c].iter().map(|&s| s * inv).collect();
            }
        }
        // an empty cluster restarts at the point worst served by its centroid
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&u, &v| {
                        let du = sq_dist(emb.row(u), &centroids[labels[u]]);
                        let dv = sq_dist(emb.row(v), &centroids[labels[v]]);
                        du.partial_cmp(&dv).expect("finite distances").then(v.cmp(&u))
                    })
                    .expect("n >= 1");
                centroids[c] = emb.row(far).to_vec();
                counts[labels[far]] -= 1;
                labels[far] = c;
                counts[c] = 1;
            }
        }
    }
    let inertia = (0..n)
        .map(|v| sq_dist(emb.row(v), &centroids[labels[v]]))
        .sum();
    Ok(KMeans {
        partition: Partition::canonical(&labels),
        centroids,
        inertia,
        iterations,
    })
}

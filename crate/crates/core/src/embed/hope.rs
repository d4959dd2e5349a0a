use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seed::rng_from_seed;

const OVERSAMPLE: usize = 10;
const POWER_ITERS: usize = 7;

pub struct HopeOutput<F> {
    pub embedding: Embedding<F>,
    /// `‖S − U_d Σ_d V_dᵀ‖_F` for the common-neighbour matrix `S = A²`.
    pub loss: f64,
    pub singular_values: Vec<f64>,
}

// A · X for the adjacency matrix, column by column.
fn adj_mul(g: &Graph, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.n();
    let mut out = DMatrix::zeros(n, x.ncols());
    out.as_mut_slice()
        .par_chunks_mut(n)
        .zip(x.as_slice().par_chunks(n))
        .for_each(|(o, col)| {
            for (u, ou) in o.iter_mut().enumerate() {
                *ou = g.neighbors(u).iter().map(|&v| col[v]).sum();
            }
        });
    out
}

fn common_neighbours_mul(g: &Graph, x: &DMatrix<f64>) -> DMatrix<f64> {
    adj_mul(g, &adj_mul(g, x))
}

/// `‖A²‖_F²` from two-hop path counts.
pub fn common_neighbours_frobenius_sq(g: &Graph) -> f64 {
    (0..g.n())
        .into_par_iter()
        .map_init(
            || vec![0u64; g.n()],
            |cnt, u| {
                let mut touched = Vec::new();
                for &w in g.neighbors(u) {
                    for &v in g.neighbors(w) {
                        if cnt[v] == 0 {
                            touched.push(v);
                        }
                        cnt[v] += 1;
                    }
                }
                let mut s = 0.0;
                for v in touched {
                    s += (cnt[v] * cnt[v]) as f64;
                    cnt[v] = 0;
                }
                s
            },
        )
        .sum()
}

/// Rank-`d` factorization of the common-neighbour matrix by randomized
/// subspace iteration; returns `U_d Σ_d^{1/2}`.
pub fn hope_embed<F: Scalar>(g: &Graph, d: usize, seed: u64) -> Result<HopeOutput<F>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::invalid("need at least two nodes"));
    }
    if d == 0 || d > n {
        return Err(Error::invalid(format!("dimension {d} must be in 1..={n}")));
    }
    let l = (d + OVERSAMPLE).min(n);
    let mut rng = rng_from_seed(seed);
    let omega = DMatrix::from_fn(n, l, |_, _| StandardNormal.sample(&mut rng));
    let mut q = common_neighbours_mul(g, &omega).qr().q();
    for _ in 0..POWER_ITERS {
        q = common_neighbours_mul(g, &q).qr().q();
    }
    // (S Q)ᵀ = Qᵀ S = B, so B's left singular vectors are the right ones of S Q
    let sq = common_neighbours_mul(g, &q);
    let svd = sq.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().take(d).map(|&k| svd.singular_values[k]).collect();

    let mut coords = vec![F::zero(); n * d];
    for (c, (&k, &s)) in order.iter().zip(&sigma).enumerate() {
        // column k of V is row k of Vᵀ; U = Q V
        let vk = v_t.row(k).transpose();
        let u = &q * vk;
        let scale = s.sqrt();
        for r in 0..n {
            coords[r * d + c] = F::of(u[r] * scale);
        }
    }
    let total = common_neighbours_frobenius_sq(g);
    let kept: f64 = sigma.iter().map(|s| s * s).sum();
    Ok(HopeOutput {
        embedding: Embedding::new(n, d, coords)?,
        loss: (total - kept).max(0.0).sqrt(),
        singular_values: sigma,
    })
}

use rayon::prelude::*;

use super::kernel::{Kernel, PowerKernel};
use super::vectors::EdgeProportionVectors;
use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::scalar::Scalar;

const MAX_BLOCKS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-6,
            max_iter: 1000,
            damping: 0.5,
        }
    }
}

/// Fitted geometric Chung-Lu model for one value of α.
#[derive(Clone, Debug)]
pub struct GclModel<F> {
    pub x: Vec<F>,
    pub alpha: F,
    pub dmax: F,
    pub degrees: Vec<F>,
    pub converged: bool,
    pub iterations: usize,
    /// Largest relative gap between expected and target degree.
    pub residual: F,
    /// Pairs whose probability `x_i x_j g` exceeded 1 and was clipped.
    pub clipped_pairs: usize,
    /// All points coincide; the kernel was replaced by `g ≡ 1`.
    pub degenerate: bool,
}

/// Normalized pairwise distances of an embedding, upper triangle, row-major.
#[derive(Clone, Debug)]
pub struct PairTable<F> {
    n: usize,
    r: Vec<F>,
    dmax: F,
    blocks: Vec<(usize, usize)>,
}

#[inline]
fn row_start(n: usize, i: usize) -> usize {
    i * n - i * (i + 1) / 2
}

// Contiguous row ranges holding roughly equal numbers of pairs.
fn row_blocks(n: usize) -> Vec<(usize, usize)> {
    let total = n * (n - 1) / 2;
    let k = MAX_BLOCKS.min(n - 1).max(1);
    let mut blocks = Vec::with_capacity(k);
    let mut lo = 0;
    for b in 1..=k {
        let target = total * b / k;
        let mut hi = lo;
        while hi < n && row_start(n, hi) < target {
            hi += 1;
        }
        if b == k {
            hi = n;
        }
        if hi > lo {
            blocks.push((lo, hi));
            lo = hi;
        }
    }
    blocks
}

impl<F: Scalar> PairTable<F> {
    pub fn new(emb: &Embedding<F>) -> Result<Self> {
        let n = emb.n();
        if n < 2 {
            return Err(Error::invalid("need at least two nodes"));
        }
        let blocks = row_blocks(n);
        let mut r = vec![F::zero(); n * (n - 1) / 2];
        let mut rest: &mut [F] = &mut r;
        let mut slices = Vec::with_capacity(blocks.len());
        for &(lo, hi) in &blocks {
            let len = row_start(n, hi) - row_start(n, lo);
            let (head, tail) = rest.split_at_mut(len);
            slices.push((lo, hi, head));
            rest = tail;
        }
        let dmax = slices
            .into_par_iter()
            .map(|(lo, hi, out)| {
                let mut k = 0;
                let mut mx = F::zero();
                for i in lo..hi {
                    let xi = emb.row(i);
                    for j in i + 1..n {
                        let d = crate::scalar::sq_dist(xi, emb.row(j)).sqrt();
                        mx = mx.max(d);
                        out[k] = d;
                        k += 1;
                    }
                }
                mx
            })
            .reduce(F::zero, |a, b| a.max(b));
        if dmax > F::zero() {
            r.par_iter_mut().for_each(|d| *d = (*d / dmax).min(F::one()));
        }
        Ok(PairTable { n, r, dmax, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dmax(&self) -> F {
        self.dmax
    }

    /// Normalized distance of the pair `i < j`.
    pub fn r(&self, i: usize, j: usize) -> F {
        self.r[row_start(self.n, i) + j - i - 1]
    }
}

/// Reusable fitting state for one embedding: the pair table plus a buffer
/// of kernel weights for the current α.
pub struct GclFitter<F, K = PowerKernel> {
    table: PairTable<F>,
    kernel: K,
    log_base: Option<Vec<F>>,
    g: Vec<F>,
    g_alpha: Option<F>,
    pub options: FitOptions,
}

impl<F: Scalar> GclFitter<F, PowerKernel> {
    pub fn new(emb: &Embedding<F>) -> Result<Self> {
        Self::with_kernel(emb, PowerKernel)
    }
}

impl<F: Scalar, K: Kernel> GclFitter<F, K> {
    pub fn with_kernel(emb: &Embedding<F>, kernel: K) -> Result<Self> {
        let table = PairTable::new(emb)?;
        let log_base = if table.dmax > F::zero() && kernel.log_base(F::zero()).is_some() {
            Some(
                table
                    .r
                    .par_iter()
                    .map(|&r| kernel.log_base(r).expect("kernel has a log form"))
                    .collect(),
            )
        } else {
            None
        };
        Ok(GclFitter {
            log_base,
            g: Vec::new(),
            table,
            kernel,
            g_alpha: None,
            options: FitOptions::default(),
        })
    }

    pub fn table(&self) -> &PairTable<F> {
        &self.table
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn degenerate(&self) -> bool {
        self.table.dmax == F::zero()
    }

    fn load_alpha(&mut self, alpha: F) {
        if self.g_alpha == Some(alpha) {
            return;
        }
        let flat = alpha == F::zero() || self.degenerate();
        let kernel = &self.kernel;
        if self.g.len() != self.table.r.len() {
            self.g = vec![F::zero(); self.table.r.len()];
        }
        if flat {
            self.g.par_iter_mut().for_each(|g| *g = F::one());
        } else if let Some(lb) = &self.log_base {
            self.g
                .par_iter_mut()
                .zip(lb.par_iter())
                .for_each(|(g, &l)| *g = (alpha * l).exp());
        } else {
            self.g
                .par_iter_mut()
                .zip(self.table.r.par_iter())
                .for_each(|(g, &r)| *g = kernel.weight(r, alpha));
        }
        self.g_alpha = Some(alpha);
    }

    // Expected degrees under clipped probabilities.
    fn expected(&self, x: &[F]) -> Vec<F> {
        let n = self.table.n;
        let g = &self.g;
        let parts: Vec<Vec<F>> = self
            .table
            .blocks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut s = vec![F::zero(); n];
                for i in lo..hi {
                    let xi = x[i];
                    if xi == F::zero() {
                        continue;
                    }
                    let row = &g[row_start(n, i)..row_start(n, i + 1)];
                    let mut si = F::zero();
                    for ((sj, &xj), &gij) in s[i + 1..].iter_mut().zip(&x[i + 1..]).zip(row) {
                        let p = (xi * xj * gij).min(F::one());
                        si += p;
                        *sj += p;
                    }
                    s[i] += si;
                }
                s
            })
            .collect();
        let mut s = vec![F::zero(); n];
        for part in parts {
            for (a, b) in s.iter_mut().zip(part) {
                *a += b;
            }
        }
        s
    }

    fn clipped(&self, x: &[F]) -> usize {
        let n = self.table.n;
        let g = &self.g;
        self.table
            .blocks
            .par_iter()
            .map(|&(lo, hi)| {
                (lo..hi)
                    .map(|i| {
                        let row = &g[row_start(n, i)..row_start(n, i + 1)];
                        x[i + 1..]
                            .iter()
                            .zip(row)
                            .filter(|(&xj, &gij)| x[i] * xj * gij > F::one())
                            .count()
                    })
                    .sum::<usize>()
            })
            .sum()
    }

    /// Fit node weights so expected degrees match `degrees` at this α.
    /// `warm` seeds the iteration with a previous solution.
    pub fn fit(&mut self, degrees: &[F], alpha: F, warm: Option<&[F]>) -> Result<GclModel<F>> {
        let n = self.table.n;
        if degrees.len() != n {
            return Err(Error::NodeCountMismatch {
                expected: n,
                found: degrees.len(),
            });
        }
        if !(alpha >= F::zero()) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        if degrees.iter().any(|w| !(*w >= F::zero()) || !w.is_finite()) {
            return Err(Error::invalid("degrees must be finite and >= 0"));
        }
        let volume: F = degrees.iter().copied().sum();
        if !(volume > F::zero()) {
            return Err(Error::invalid("need at least one positive degree"));
        }
        let degenerate = self.degenerate();
        if degenerate && alpha > F::zero() {
            log::warn!("all embedding points coincide; using g = 1 at alpha {alpha}");
        }
        self.load_alpha(alpha);

        let mut x: Vec<F> = match warm {
            Some(w) if w.len() == n => w
                .iter()
                .zip(degrees)
                .map(|(&xi, &wi)| if wi > F::zero() && xi > F::zero() { xi } else { wi / volume.sqrt() })
                .collect(),
            _ => degrees.iter().map(|&wi| wi / volume.sqrt()).collect(),
        };
        let tol = F::of(self.options.tol);
        let lambda = F::of(self.options.damping);
        let mut best: Option<(Vec<F>, F)> = None;
        let mut converged = false;
        let mut iterations = 0;
        for it in 0..=self.options.max_iter {
            let s = self.expected(&x);
            let residual = degrees
                .iter()
                .zip(&s)
                .filter(|(w, _)| **w > F::zero())
                .map(|(&w, &si)| (si - w).abs() / w)
                .fold(F::zero(), |a, b| a.max(b));
            let residual = if residual.is_nan() { F::infinity() } else { residual };
            if best.as_ref().is_none_or(|b| residual < b.1) {
                best = Some((x.clone(), residual));
            }
            iterations = it;
            if residual <= tol {
                converged = true;
                break;
            }
            if it == self.options.max_iter {
                break;
            }
            for ((xi, &w), &si) in x.iter_mut().zip(degrees).zip(&s) {
                if w == F::zero() {
                    *xi = F::zero();
                } else if si > F::zero() {
                    *xi = (F::one() - lambda) * *xi + lambda * *xi * w / si;
                } else {
                    *xi *= F::of(2.0);
                }
            }
        }
        let (x, residual) = best.expect("at least one iteration");
        let clipped_pairs = self.clipped(&x);
        if !converged {
            log::warn!(
                "GCL fit at alpha {alpha} stopped after {iterations} iterations with residual {residual:e}"
            );
        }
        Ok(GclModel {
            x,
            alpha,
            dmax: self.table.dmax,
            degrees: degrees.to_vec(),
            converged,
            iterations,
            residual,
            clipped_pairs,
            degenerate,
        })
    }

    /// Expected degree of every node under a fitted model.
    pub fn expected_degrees(&mut self, model: &GclModel<F>) -> Vec<F> {
        self.load_alpha(model.alpha);
        self.expected(&model.x)
    }

    /// Normalized expected edge mass inside and between communities.
    pub fn model_vectors(
        &mut self,
        model: &GclModel<F>,
        p: &Partition,
    ) -> Result<EdgeProportionVectors<F>> {
        let n = self.table.n;
        if p.n() != n || model.x.len() != n {
            return Err(Error::NodeCountMismatch {
                expected: n,
                found: p.n(),
            });
        }
        self.load_alpha(model.alpha);
        let ell = p.ell();
        let labels = p.labels();
        let x = &model.x;
        let g = &self.g;
        let parts: Vec<Vec<F>> = self
            .table
            .blocks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut m = vec![F::zero(); ell * ell];
                for i in lo..hi {
                    let xi = x[i];
                    if xi == F::zero() {
                        continue;
                    }
                    let base = labels[i] * ell;
                    let row = &g[row_start(n, i)..row_start(n, i + 1)];
                    for ((&xj, &lj), &gij) in x[i + 1..].iter().zip(&labels[i + 1..]).zip(row) {
                        m[base + lj] += (xi * xj * gij).min(F::one());
                    }
                }
                m
            })
            .collect();
        let mut m = vec![F::zero(); ell * ell];
        for part in parts {
            for (a, b) in m.iter_mut().zip(part) {
                *a += b;
            }
        }
        EdgeProportionVectors::from_block_matrix(&m, ell)
    }
}

/// One-shot fit: builds the pair table for `emb` and fits at `alpha`.
pub fn fit_gcl<F: Scalar>(degrees: &[F], emb: &Embedding<F>, alpha: F) -> Result<GclModel<F>> {
    GclFitter::new(emb)?.fit(degrees, alpha, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_rows() {
        for n in [2, 3, 7, 64, 65, 300] {
            let b = row_blocks(n);
            assert_eq!(b[0].0, 0);
            assert_eq!(b.last().unwrap().1, n);
            for w in b.windows(2) {
                assert_eq!(w[0].1, w[1].0);
            }
        }
    }

    #[test]
    fn regular_degrees_at_alpha_zero() {
        let n = 9;
        let coords: Vec<f64> = (0..n * 2).map(|k| (k * 7 % 5) as f64).collect();
        let emb = Embedding::new(n, 2, coords).unwrap();
        let c = 3.0;
        let m = fit_gcl(&vec![c; n], &emb, 0.0f64).unwrap();
        assert!(m.converged);
        for &x in &m.x {
            assert!((x * x * (n as f64 - 1.0) - c).abs() < 1e-9);
        }
    }

    #[test]
    fn isolated_nodes_get_zero_weight() {
        let emb = Embedding::new(4, 1, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let m = fit_gcl(&[1.0, 0.0, 1.0, 1.0], &emb, 0.0).unwrap();
        assert!(m.converged);
        assert_eq!(m.x[1], 0.0);
    }

    #[test]
    fn coincident_points_fall_back_to_chung_lu() {
        let emb = Embedding::new(3, 2, vec![1.0; 6]).unwrap();
        let m = fit_gcl(&[1.0f64, 1.0, 1.0], &emb, 2.0).unwrap();
        assert!(m.degenerate && m.converged);
        assert!((m.x[0] * m.x[0] * 2.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        let emb = Embedding::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(fit_gcl(&[0.0, 0.0], &emb, 1.0).is_err());
        assert!(fit_gcl(&[1.0], &emb, 1.0).is_err());
        assert!(fit_gcl(&[1.0, 1.0], &emb, -1.0).is_err());
        let one = Embedding::new(1, 1, vec![0.0]).unwrap();
        assert!(fit_gcl(&[1.0], &one, 0.0).is_err());
    }

    #[test]
    fn infeasible_target_is_flagged() {
        // two nodes at maximal distance never connect when alpha > 0
        let emb = Embedding::new(2, 1, vec![0.0, 1.0]).unwrap();
        let mut f = GclFitter::new(&emb).unwrap();
        f.options.max_iter = 50;
        let m = f.fit(&[1.0, 1.0], 1.0, None).unwrap();
        assert!(!m.converged);
        let m = f.fit(&[1.0f64, 1.0], 0.0, None).unwrap();
        assert!(m.converged);
        assert!(((m.x[0] * m.x[1]).min(1.0) - 1.0).abs() < 1e-6);
    }
}

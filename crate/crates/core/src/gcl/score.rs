use std::fmt::Write as _;

use super::fit::{FitOptions, GclFitter};
use super::jsd::js_divergence;
use super::kernel::{Kernel, PowerKernel};
use super::vectors::{graph_vectors, EdgeProportionVectors};
use crate::clustering::Clusterer;
use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::scalar::Scalar;

/// `{0, 0.25, …, 10}`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.25).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreOptions {
    pub alpha_grid: Vec<f64>,
    /// When the grid minimum sits on the largest grid value, the search
    /// continues upward with doubling steps while Δ keeps falling and the
    /// fits converge, up to here.
    pub alpha_cap: f64,
    /// Golden-section refinement stops once the bracket is this narrow.
    pub refine_width: f64,
    /// Weights of the inter- and intra-community terms.
    pub weights: (f64, f64),
    pub fit: FitOptions,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            alpha_grid: default_alpha_grid(),
            alpha_cap: 100.0,
            refine_width: 1e-2,
            weights: (0.5, 0.5),
            fit: FitOptions::default(),
        }
    }
}

impl ScoreOptions {
    fn validate(&self) -> Result<()> {
        if self.alpha_grid.is_empty() {
            return Err(Error::Empty("alpha grid".into()));
        }
        if self.alpha_grid.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::invalid("alpha grid values must be finite and >= 0"));
        }
        if self.alpha_cap.is_nan() {
            return Err(Error::invalid("alpha cap must not be NaN"));
        }
        let (a, b) = self.weights;
        if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
            return Err(Error::invalid("term weights must be >= 0 and not both 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint<F> {
    pub alpha: F,
    pub divergence: F,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct DivergenceReport<F> {
    pub graph_vectors: EdgeProportionVectors<F>,
    pub best_alpha: F,
    /// Every evaluated α, sorted.
    pub curve: Vec<CurvePoint<F>>,
    pub score: F,
    pub clusterer: String,
    pub embedding: String,
    pub kernel: String,
    /// Single community, a term without mass, or a collapsed embedding.
    pub degenerate: bool,
    /// The fit at `best_alpha` met the tolerance.
    pub converged: bool,
    pub nonconverged_fits: usize,
    pub clipped_pairs: usize,
    pub best_residual: F,
}

impl<F: Scalar> DivergenceReport<F> {
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "score={}", self.score);
        let _ = writeln!(s, "best_alpha={}", self.best_alpha);
        let _ = writeln!(s, "clusterer={}", self.clusterer);
        let _ = writeln!(s, "embedding={}", self.embedding);
        let _ = writeln!(s, "kernel={}", self.kernel);
        let _ = writeln!(s, "communities={}", self.graph_vectors.ell());
        let _ = writeln!(s, "degenerate={}", self.degenerate);
        let _ = writeln!(s, "converged={}", self.converged);
        let _ = writeln!(s, "nonconverged_fits={}", self.nonconverged_fits);
        let _ = writeln!(s, "clipped_pairs={}", self.clipped_pairs);
        let _ = writeln!(s, "best_residual={:e}", self.best_residual);
        let _ = writeln!(s, "evaluations={}", self.curve.len());
        s
    }

    pub fn curve_csv(&self) -> String {
        let mut s = String::from("alpha,divergence,converged\n");
        for p in &self.curve {
            let _ = writeln!(s, "{},{},{}", p.alpha, p.divergence, p.converged);
        }
        s
    }
}

/// `w_inter · JSD(inter) + w_intra · JSD(intra)`. A term whose graph vector
/// carries no mass (or does not exist) is dropped and the remaining weight
/// renormalized; the flag reports when that happened.
pub fn weighted_divergence<F: Scalar>(
    graph: &EdgeProportionVectors<F>,
    model: &EdgeProportionVectors<F>,
    weights: (f64, f64),
) -> Result<(F, bool)> {
    if graph.ell() != model.ell() || graph.inter.len() != model.inter.len() {
        return Err(Error::LengthMismatch(format!(
            "graph has {} communities, model {}",
            graph.ell(),
            model.ell()
        )));
    }
    let mut total = F::zero();
    let mut used = F::zero();
    let mut dropped = false;
    for (gv, mv, w) in [
        (&graph.inter, &model.inter, weights.0),
        (&graph.intra, &model.intra, weights.1),
    ] {
        let gm: F = gv.iter().copied().sum();
        if gv.is_empty() || !(gm > F::zero()) {
            dropped = true;
            continue;
        }
        let mm: F = mv.iter().copied().sum();
        let js = if mm > F::zero() {
            js_divergence(gv, mv)?
        } else {
            F::of(std::f64::consts::LN_2)
        };
        total += F::of(w) * js;
        used += F::of(w);
    }
    if used == F::zero() {
        return Ok((F::zero(), true));
    }
    Ok((total / used, dropped))
}

/// Scores embeddings of one graph against one fixed partition.
pub struct DivergenceScorer<'g, F> {
    graph: &'g Graph,
    partition: Partition,
    graph_vectors: EdgeProportionVectors<F>,
    degrees: Vec<F>,
    clusterer: String,
    pub options: ScoreOptions,
}

impl<'g, F: Scalar> DivergenceScorer<'g, F> {
    pub fn new(graph: &'g Graph, partition: Partition, clusterer: impl Into<String>) -> Result<Self> {
        let graph_vectors = graph_vectors(graph, &partition)?;
        let degrees = graph.degree_sequence().into_iter().map(F::of_usize).collect();
        Ok(DivergenceScorer {
            graph,
            partition,
            graph_vectors,
            degrees,
            clusterer: clusterer.into(),
            options: ScoreOptions::default(),
        })
    }

    /// Cluster once with `clusterer` and keep the result for every embedding.
    pub fn from_clusterer(graph: &'g Graph, clusterer: &Clusterer, seed: u64) -> Result<Self> {
        if graph.m() == 0 {
            return Err(Error::Empty("graph has no edges".into()));
        }
        let p = clusterer.cluster(graph, seed)?;
        Self::new(graph, p, clusterer.id())
    }

    pub fn with_options(mut self, options: ScoreOptions) -> Self {
        self.options = options;
        self
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn graph_vectors(&self) -> &EdgeProportionVectors<F> {
        &self.graph_vectors
    }

    fn check(&self, emb: &Embedding<F>) -> Result<()> {
        if emb.n() != self.graph.n() {
            return Err(Error::NodeCountMismatch {
                expected: self.graph.n(),
                found: emb.n(),
            });
        }
        self.options.validate()
    }

    pub fn divergence_at_alpha(&self, emb: &Embedding<F>, alpha: F) -> Result<F> {
        self.check(emb)?;
        let mut fitter = GclFitter::new(emb)?;
        fitter.options = self.options.fit.clone();
        let model = fitter.fit(&self.degrees, alpha, None)?;
        let mv = fitter.model_vectors(&model, &self.partition)?;
        Ok(weighted_divergence(&self.graph_vectors, &mv, self.options.weights)?.0)
    }

    pub fn score(&self, emb: &Embedding<F>, embedding_id: &str) -> Result<DivergenceReport<F>> {
        self.score_with_kernel(emb, embedding_id, PowerKernel)
    }

    pub fn score_with_kernel<K: Kernel>(
        &self,
        emb: &Embedding<F>,
        embedding_id: &str,
        kernel: K,
    ) -> Result<DivergenceReport<F>> {
        self.check(emb)?;
        let kernel_id = kernel.id();
        let mut fitter = GclFitter::with_kernel(emb, kernel)?;
        fitter.options = self.options.fit.clone();
        let mut degenerate = self.partition.ell() == 1 || fitter.degenerate();
        let mut warm: Option<Vec<F>> = None;
        // (alpha, divergence, converged, clipped, residual)
        let mut evals: Vec<(f64, F, bool, usize, F)> = Vec::new();

        let mut eval = |alpha: f64,
                        warm: &mut Option<Vec<F>>,
                        evals: &mut Vec<(f64, F, bool, usize, F)>,
                        degenerate: &mut bool|
         -> Result<F> {
            if let Some(e) = evals.iter().find(|e| e.0 == alpha) {
                return Ok(e.1);
            }
            let model = fitter.fit(&self.degrees, F::of(alpha), warm.as_deref())?;
            let mv = fitter.model_vectors(&model, &self.partition)?;
            let (div, dropped) = weighted_divergence(&self.graph_vectors, &mv, self.options.weights)?;
            *degenerate |= dropped;
            evals.push((alpha, div, model.converged, model.clipped_pairs, model.residual));
            *warm = Some(model.x);
            Ok(div)
        };

        let mut grid = self.options.alpha_grid.clone();
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        grid.dedup();
        let mut best_k = 0;
        let mut best = F::infinity();
        for (k, &a) in grid.iter().enumerate() {
            let d = eval(a, &mut warm, &mut evals, &mut degenerate)?;
            if d < best {
                best = d;
                best_k = k;
            }
        }
        if best_k == grid.len() - 1 && grid.len() > 1 {
            let mut step = grid[best_k] - grid[best_k - 1];
            loop {
                let a = grid[best_k] + step;
                if a > self.options.alpha_cap {
                    break;
                }
                let d = eval(a, &mut warm, &mut evals, &mut degenerate)?;
                grid.push(a);
                let converged = evals.last().is_some_and(|e| e.2);
                if d >= best || !converged {
                    break;
                }
                best = d;
                best_k += 1;
                step *= 2.0;
            }
        }

        // golden-section search inside the cells next to the grid minimum
        let lo = grid[best_k.saturating_sub(1)];
        let hi = grid[(best_k + 1).min(grid.len() - 1)];
        if hi - lo > self.options.refine_width {
            let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = (lo, hi);
            let mut c = b - inv_phi * (b - a);
            let mut d = a + inv_phi * (b - a);
            let mut fc = eval(c, &mut warm, &mut evals, &mut degenerate)?;
            let mut fd = eval(d, &mut warm, &mut evals, &mut degenerate)?;
            while b - a > self.options.refine_width {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = eval(c, &mut warm, &mut evals, &mut degenerate)?;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = eval(d, &mut warm, &mut evals, &mut degenerate)?;
                }
            }
        }

        evals.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite alpha"));
        let best = evals
            .iter()
            .min_by(|x, y| x.1.partial_cmp(&y.1).expect("finite divergence"))
            .expect("nonempty grid");
        let nonconverged_fits = evals.iter().filter(|e| !e.2).count();
        if nonconverged_fits > 0 {
            log::warn!("{nonconverged_fits} of {} GCL fits did not converge", evals.len());
        }
        Ok(DivergenceReport {
            graph_vectors: self.graph_vectors.clone(),
            best_alpha: F::of(best.0),
            score: best.1,
            converged: best.2,
            clipped_pairs: best.3,
            best_residual: best.4,
            curve: evals
                .iter()
                .map(|e| CurvePoint {
                    alpha: F::of(e.0),
                    divergence: e.1,
                    converged: e.2,
                })
                .collect(),
            clusterer: self.clusterer.clone(),
            embedding: embedding_id.to_string(),
            kernel: kernel_id,
            degenerate,
            nonconverged_fits,
        })
    }
}

/// `Δ_α` for a given partition, embedding and α.
pub fn divergence_at_alpha<F: Scalar>(
    g: &Graph,
    p: &Partition,
    emb: &Embedding<F>,
    alpha: F,
    weights: (f64, f64),
) -> Result<F> {
    let mut s = DivergenceScorer::new(g, p.clone(), "given")?;
    s.options.weights = weights;
    s.divergence_at_alpha(emb, alpha)
}

/// Cluster `g`, then score `emb` over the α grid in `options`.
pub fn divergence_score<F: Scalar>(
    g: &Graph,
    emb: &Embedding<F>,
    clusterer: &Clusterer,
    seed: u64,
    options: &ScoreOptions,
) -> Result<DivergenceReport<F>> {
    DivergenceScorer::from_clusterer(g, clusterer, seed)?
        .with_options(options.clone())
        .score(emb, "embedding")
}

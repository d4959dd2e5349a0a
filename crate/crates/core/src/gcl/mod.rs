//! Divergence between a graph's community edge structure and the structure
//! predicted by a geometric Chung-Lu model built on an embedding.

mod fit;
mod jsd;
mod kernel;
mod score;
mod vectors;

pub use fit::{fit_gcl, FitOptions, GclFitter, GclModel, PairTable};
pub use jsd::{js_divergence, kl_divergence};
pub use kernel::{Kernel, PowerKernel};
pub use score::{
    default_alpha_grid, divergence_at_alpha, divergence_score, weighted_divergence, CurvePoint,
    DivergenceReport, DivergenceScorer, ScoreOptions,
};
pub use vectors::{graph_vectors, pair_index, EdgeProportionVectors};

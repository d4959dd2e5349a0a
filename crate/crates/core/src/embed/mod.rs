//! Reference embedders, the random baseline and the embedding file format.

mod embedding;
mod hope;
mod io;
mod random;
mod sgns;
mod walks;

pub use embedding::Embedding;
pub use hope::{common_neighbours_frobenius_sq, hope_embed, HopeOutput};
pub use io::{load_embedding, read_embedding, save_embedding, write_embedding};
pub use random::random_embedding;
pub use sgns::{train_sgns, SgnsOutput, SgnsParams};
pub use walks::{generate_walks, transition_weight, WalkParams};

use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seed::derive_seed;

/// An embedding method together with all of its hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub enum EmbedAlgo {
    Node2Vec { walks: WalkParams, sgns: SgnsParams },
    Hope { dim: usize },
    Random { dim: usize },
}

impl EmbedAlgo {
    pub fn node2vec(dim: usize, p: f64, q: f64) -> Self {
        EmbedAlgo::Node2Vec {
            walks: WalkParams {
                p,
                q,
                ..WalkParams::default()
            },
            sgns: SgnsParams {
                dim,
                ..SgnsParams::default()
            },
        }
    }

    /// node2vec with uniform walks.
    pub fn deepwalk(dim: usize) -> Self {
        Self::node2vec(dim, 1.0, 1.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            EmbedAlgo::Node2Vec { .. } => "node2vec",
            EmbedAlgo::Hope { .. } => "hope",
            EmbedAlgo::Random { .. } => "random",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EmbedAlgo::Node2Vec { sgns, .. } => sgns.dim,
            EmbedAlgo::Hope { dim } | EmbedAlgo::Random { dim } => *dim,
        }
    }

    pub fn with_dim(&self, dim: usize) -> Self {
        let mut a = self.clone();
        match &mut a {
            EmbedAlgo::Node2Vec { sgns, .. } => sgns.dim = dim,
            EmbedAlgo::Hope { dim: d } | EmbedAlgo::Random { dim: d } => *d = dim,
        }
        a
    }

    /// Method and settings other than the dimension, e.g. `node2vec_p1_q0.5`.
    pub fn label(&self) -> String {
        match self {
            EmbedAlgo::Node2Vec { walks, .. } => format!("node2vec_p{}_q{}", walks.p, walks.q),
            other => other.name().to_string(),
        }
    }

    /// Label plus dimension, e.g. `hope_d8`.
    pub fn id(&self) -> String {
        format!("{}_d{}", self.label(), self.dim())
    }

    pub fn embed<F: Scalar>(&self, g: &Graph, seed: u64) -> Result<Embedding<F>> {
        match self {
            EmbedAlgo::Node2Vec { walks, sgns } => {
                let w = generate_walks(g, walks, derive_seed(seed, &[0]))?;
                Ok(train_sgns(&w, g.n(), sgns, derive_seed(seed, &[1]))?.embedding)
            }
            EmbedAlgo::Hope { dim } => Ok(hope_embed(g, *dim, seed)?.embedding),
            EmbedAlgo::Random { dim } => random_embedding(g.n(), *dim, seed),
        }
    }
}

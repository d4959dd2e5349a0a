//! Unsupervised scoring of graph embeddings.
//!
//! A graph is clustered once; an embedding is then judged by how well a
//! geometric Chung-Lu model built on its coordinates reproduces the share of
//! edges inside and between the clusters. The crate also ships the pieces
//! needed to study the score: an ABCD benchmark generator, Louvain/ECG
//! clustering, node2vec/HOPE/random embedders, supervised evaluation tasks
//! and a sweep harness.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod abcd;
pub mod clustering;
pub mod embed;
pub mod error;
pub mod eval;
pub mod gcl;
pub mod graph;
pub mod scalar;
pub mod seed;
pub mod sweep;

pub use error::{Error, Result};
pub use graph::{Graph, GraphStats, Partition};
pub use scalar::Scalar;

pub type Embedding64 = embed::Embedding<f64>;
pub type Embedding32 = embed::Embedding<f32>;
pub type GclModel64 = gcl::GclModel<f64>;
pub type GclModel32 = gcl::GclModel<f32>;
pub type DivergenceReport64 = gcl::DivergenceReport<f64>;
pub type DivergenceReport32 = gcl::DivergenceReport<f32>;
pub type EdgeProportionVectors64 = gcl::EdgeProportionVectors<f64>;
pub type DivergenceScorer64<'g> = gcl::DivergenceScorer<'g, f64>;

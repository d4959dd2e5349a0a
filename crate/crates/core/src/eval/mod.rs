//! Supervised checks of embedding quality and the statistics used to relate
//! them to the divergence score.

mod ami;
mod kmeans;
mod knn;
mod linkpred;
mod metrics;

use std::fmt;
use std::str::FromStr;

pub use ami::{ami, expected_mutual_information};
pub use kmeans::{kmeans, KMeans};
pub use knn::{knn_classify, stratified_split};
pub use linkpred::{
    link_prediction_experiment, link_prediction_split, score_link_prediction, LinkPredOutcome,
    LinkScores, LinkSplit,
};
pub use metrics::{auc, pearson, variance_decomposition, VarianceDecomposition};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Accuracy,
    Ami,
    Auc,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Accuracy => "accuracy",
            Metric::Ami => "ami",
            Metric::Auc => "auc",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "accuracy" => Ok(Metric::Accuracy),
            "ami" => Ok(Metric::Ami),
            "auc" => Ok(Metric::Auc),
            other => Err(Error::Invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// One task measurement for one embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskResult {
    pub metric: Metric,
    pub value: f64,
    pub replicate: usize,
    pub embedding: String,
    pub divergence: f64,
}

use rand::Rng as _;

use super::Embedding;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::seed::rng_from_seed;

/// I.i.d. uniform coordinates in `[0, 1]^d`.
pub fn random_embedding<F: Scalar>(n: usize, d: usize, seed: u64) -> Result<Embedding<F>> {
    let mut rng = rng_from_seed(seed);
    let coords = (0..n * d).map(|_| F::of(rng.random::<f64>())).collect();
    Embedding::new(n, d, coords)
}

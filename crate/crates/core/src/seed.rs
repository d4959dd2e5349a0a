//! Reproducible seed derivation.
//!
//! Every random stream in a sweep is keyed by a path of integers
//! (base seed, graph index, replicate, ...) so that any single job can be
//! replayed in isolation and jobs can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere in the crate. ChaCha is portable and
/// value-stable across platforms and crate versions.
pub type Rng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a path of stream coordinates.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Convenience: `rng_from_seed(derive_seed(base, path))`.
pub fn stream(base: u64, path: &[u64]) -> Rng {
    rng_from_seed(derive_seed(base, path))
}

//! Floating-point scalar abstraction shared by the numeric modules.
//!
//! Graph bookkeeping is integer-valued; everything that touches real
//! coordinates (embeddings, the Chung-Lu fit, divergences, evaluation
//! metrics) is generic over [`Scalar`], implemented for `f32` and `f64`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, NumCast, ToPrimitive};

/// Real scalar usable throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + NumAssign
    + Sum
    + Default
    + Send
    + Sync
    + Debug
    + Display
    + LowerExp
    + FromStr
    + 'static
{
    /// Short name used in manifests and file headers.
    const NAME: &'static str;

    /// Lossy conversion from `f64`.
    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 is representable in every Scalar")
    }

    /// Lossless widening (or identity) to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar widens to f64")
    }

    /// Conversion from a count.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
}

/// Dot product with eight independent accumulators so the loop vectorizes.
#[inline]
pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [F::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = F::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Squared Euclidean distance, same accumulation scheme as [`dot`].
#[inline]
pub fn sq_dist<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [F::zero(); 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            let t = x[k] - y[k];
            acc[k] += t * t;
        }
    }
    let mut tail = F::zero();
    for (x, y) in ra.iter().zip(rb) {
        let t = *x - *y;
        tail += t * t;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `y += a * x`
#[inline]
pub fn axpy<F: Scalar>(a: F, x: &[F], y: &mut [F]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * *xi;
    }
}

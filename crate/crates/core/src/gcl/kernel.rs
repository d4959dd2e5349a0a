use crate::scalar::Scalar;

/// Distance kernel of the geometric Chung-Lu model. `r` is the distance
/// divided by the largest pairwise distance, so `r ∈ [0, 1]`.
pub trait Kernel: Sync {
    fn id(&self) -> String;
    fn weight<F: Scalar>(&self, r: F, alpha: F) -> F;

    /// For kernels of the form `h(r)^α`, returns `ln h(r)` so callers can
    /// cache it and evaluate any α with one `exp`.
    fn log_base<F: Scalar>(&self, _r: F) -> Option<F> {
        None
    }
}

/// `g_α(r) = (1 − r)^α`, with `g_0 ≡ 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PowerKernel;

impl Kernel for PowerKernel {
    fn id(&self) -> String {
        "power".into()
    }

    #[inline]
    fn weight<F: Scalar>(&self, r: F, alpha: F) -> F {
        if alpha == F::zero() {
            F::one()
        } else {
            (F::one() - r).max(F::zero()).powf(alpha)
        }
    }

    #[inline]
    fn log_base<F: Scalar>(&self, r: F) -> Option<F> {
        Some((F::one() - r).max(F::zero()).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_kernel_values() {
        let k = PowerKernel;
        assert_eq!(k.weight(1.0f64, 0.0), 1.0);
        assert_eq!(k.weight(1.0f64, 2.0), 0.0);
        assert_eq!(k.weight(0.0f64, 7.0), 1.0);
        assert!((k.weight(0.5f64, 2.0) - 0.25).abs() < 1e-15);
        assert!(k.weight(0.2f32, 3.0) > k.weight(0.2f32, 4.0));
        let via_log = (2.5 * k.log_base(0.3f64).unwrap()).exp();
        assert!((via_log - k.weight(0.3, 2.5)).abs() < 1e-15);
        assert_eq!((3.0 * k.log_base(1.0f64).unwrap()).exp(), 0.0);
    }
}

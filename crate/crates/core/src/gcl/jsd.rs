use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn normalized<F: Scalar>(p: &[F], name: &str) -> Result<Vec<F>> {
    if let Some(x) = p.iter().find(|x| !(**x >= F::zero()) || !x.is_finite()) {
        return Err(Error::invalid(format!("{name} has invalid entry {x}")));
    }
    let s: F = p.iter().copied().sum();
    if !(s > F::zero()) {
        return Err(Error::invalid(format!("{name} has zero mass")));
    }
    Ok(p.iter().map(|&x| x / s).collect())
}

/// Kullback-Leibler divergence in nats with `0 ln 0 = 0`; assumes `q > 0`
/// wherever `p > 0`.
pub fn kl_divergence<F: Scalar>(p: &[F], q: &[F]) -> F {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > F::zero())
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum()
}

/// Jensen-Shannon divergence (natural log) of two distributions on the same
/// support. Inputs are renormalized to unit mass first.
pub fn js_divergence<F: Scalar>(p: &[F], q: &[F]) -> Result<F> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::Empty("distributions have no support".into()));
    }
    let p = normalized(p, "p")?;
    let q = normalized(q, "q")?;
    let half = F::of(0.5);
    let m: Vec<F> = p.iter().zip(&q).map(|(&a, &b)| half * (a + b)).collect();
    let js = half * kl_divergence(&p, &m) + half * kl_divergence(&q, &m);
    // rounding can leave tiny negatives or overshoot ln 2
    Ok(js.max(F::zero()).min(F::of(std::f64::consts::LN_2)))
}

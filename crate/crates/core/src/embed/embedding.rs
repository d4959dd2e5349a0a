use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `n × d` matrix of node coordinates, row-major, one row per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<F> {
    n: usize,
    d: usize,
    coords: Vec<F>,
}

impl<F: Scalar> Embedding<F> {
    pub fn new(n: usize, d: usize, coords: Vec<F>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!("embedding shape {n}x{d} is empty")));
        }
        if coords.len() != n * d {
            return Err(Error::LengthMismatch(format!(
                "{} coordinates for a {n}x{d} embedding",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite coordinate at node {} dim {}",
                i / d,
                i % d
            )));
        }
        Ok(Embedding { n, d, coords })
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Embedding {
            n,
            d,
            coords: vec![F::zero(); n * d],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[F] {
        &self.coords[v * self.d..(v + 1) * self.d]
    }

    #[inline]
    pub fn row_mut(&mut self, v: usize) -> &mut [F] {
        &mut self.coords[v * self.d..(v + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.coords
    }

    pub fn distance(&self, u: usize, v: usize) -> F {
        crate::scalar::sq_dist(self.row(u), self.row(v)).sqrt()
    }

    /// Element-wise conversion to another scalar type.
    pub fn cast<G: Scalar>(&self) -> Embedding<G> {
        Embedding {
            n: self.n,
            d: self.d,
            coords: self.coords.iter().map(|c| G::of(c.as_f64())).collect(),
        }
    }

    /// Affine image `x -> A x + t` with `A` given row-major as `d' × d`.
    pub fn affine(&self, a: &[F], rows: usize, t: &[F]) -> Result<Self> {
        if a.len() != rows * self.d || t.len() != rows {
            return Err(Error::LengthMismatch("affine map shape".into()));
        }
        let mut out = Vec::with_capacity(self.n * rows);
        for v in 0..self.n {
            let x = self.row(v);
            for r in 0..rows {
                out.push(crate::scalar::dot(&a[r * self.d..(r + 1) * self.d], x) + t[r]);
            }
        }
        Embedding::new(self.n, rows, out)
    }

    /// Multiply every coordinate by `c`.
    pub fn scaled(&self, c: F) -> Self {
        Embedding {
            n: self.n,
            d: self.d,
            coords: self.coords.iter().map(|&x| x * c).collect(),
        }
    }
}

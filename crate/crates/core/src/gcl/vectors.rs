use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::scalar::Scalar;

/// Edge mass between and inside communities. `inter` is indexed by pairs
/// `(i, j)`, `i < j`, in lexicographic order; `intra` by community.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProportionVectors<F> {
    pub inter: Vec<F>,
    pub intra: Vec<F>,
}

/// Position of the community pair `(i, j)`, `i < j`, inside an inter vector.
#[inline]
pub fn pair_index(i: usize, j: usize, ell: usize) -> usize {
    debug_assert!(i < j && j < ell);
    i * (2 * ell - i - 1) / 2 + (j - i - 1)
}

impl<F: Scalar> EdgeProportionVectors<F> {
    pub fn ell(&self) -> usize {
        self.intra.len()
    }

    pub fn inter_mass(&self) -> F {
        self.inter.iter().copied().sum()
    }

    pub fn intra_mass(&self) -> F {
        self.intra.iter().copied().sum()
    }

    pub fn total(&self) -> F {
        self.inter_mass() + self.intra_mass()
    }

    pub fn inter_at(&self, i: usize, j: usize) -> F {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.inter[pair_index(a, b, self.ell())]
    }

    /// Build from a symmetric `ℓ × ℓ` matrix of accumulated pair weight,
    /// where off-diagonal mass may be split between `(i, j)` and `(j, i)`.
    pub(crate) fn from_block_matrix(m: &[F], ell: usize) -> Result<Self> {
        let total: F = m.iter().copied().sum();
        if !(total > F::zero()) {
            return Err(Error::invalid("no pair mass to normalize"));
        }
        let mut inter = Vec::with_capacity(ell * ell.saturating_sub(1) / 2);
        for i in 0..ell {
            for j in i + 1..ell {
                inter.push((m[i * ell + j] + m[j * ell + i]) / total);
            }
        }
        let intra = (0..ell).map(|i| m[i * ell + i] / total).collect();
        Ok(EdgeProportionVectors { inter, intra })
    }

    pub fn cast<G: Scalar>(&self) -> EdgeProportionVectors<G> {
        EdgeProportionVectors {
            inter: self.inter.iter().map(|x| G::of(x.as_f64())).collect(),
            intra: self.intra.iter().map(|x| G::of(x.as_f64())).collect(),
        }
    }
}

/// Fractions of the graph's edges inside each community and between each
/// pair of communities.
pub fn graph_vectors<F: Scalar>(g: &Graph, p: &Partition) -> Result<EdgeProportionVectors<F>> {
    if p.n() != g.n() {
        return Err(Error::NodeCountMismatch {
            expected: g.n(),
            found: p.n(),
        });
    }
    if g.m() == 0 {
        return Err(Error::Empty("graph has no edges".into()));
    }
    let ell = p.ell();
    let mut counts = vec![0u64; ell * ell];
    for (u, v) in g.edges() {
        let (a, b) = (p.label(u), p.label(v));
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        counts[a * ell + b] += 1;
    }
    let m = counts.iter().map(|&c| F::of(c as f64)).collect::<Vec<_>>();
    EdgeProportionVectors::from_block_matrix(&m, ell)
}

//! Nonsmooth penalties: the [`Penalty`] interface used by the solvers, the
//! weighted ℓp penalty for `0 ≤ p ≤ 1`, its scalar proximal map, and the SCD
//! regularity diagnostic.

mod lp;
mod prox;
pub(crate) mod regularity;

pub use lp::LpPenalty;
pub use prox::prox_scalar;
pub use regularity::{check_scd_regularity, RegularityReport, MAX_ENUMERATION_DIM, SINGULAR_THRESHOLD};

use crate::error::Result;
use crate::vecops::Compensated;

/// Largest magnitude allowed for a curvature entry of an [`ScdBasis`].
pub const CURVATURE_CAP: f64 = 1e12;

/// A nonsmooth, possibly nonconvex term `g` of a composite objective.
pub trait Penalty: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, z: &[f64]) -> f64;

    fn value_compensated(&self, z: &[f64]) -> Compensated {
        Compensated::new(self.value(z), 0.0)
    }

    /// One element of `prox_{λg}(v)`; `lambda` must be positive.
    fn prox(&self, lambda: f64, v: &[f64]) -> Result<Vec<f64>>;

    /// A subspace `(P, W)` of the SC derivative of `∂g` at `(z, z*)`.
    fn scd_basis(&self, z: &[f64], subgradient: &[f64]) -> ScdBasis;

    fn is_convex(&self) -> bool;
}

/// Diagonal `(P, W)` pair: `P` projects onto the active coordinates, `W`
/// carries the curvature on the active block and is 1 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ScdBasis {
    dim: usize,
    active: Vec<usize>,
    curvature: Vec<f64>,
}

impl ScdBasis {
    /// `active` must be strictly increasing and `< dim`; `curvature[k]` belongs to `active[k]`.
    pub fn new(dim: usize, active: Vec<usize>, curvature: Vec<f64>) -> Self {
        assert_eq!(active.len(), curvature.len(), "one curvature per active index");
        assert!(active.windows(2).all(|w| w[0] < w[1]), "active set must be sorted");
        assert!(active.last().is_none_or(|&i| i < dim), "active index out of range");
        ScdBasis {
            dim,
            active,
            curvature,
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Diagonal of `P`.
    pub fn p_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &i in &self.active {
            d[i] = 1.0;
        }
        d
    }

    /// Diagonal of `W`.
    pub fn w_diagonal(&self) -> Vec<f64> {
        let mut d = vec![1.0; self.dim];
        for (&i, &c) in self.active.iter().zip(&self.curvature) {
            d[i] = c;
        }
        d
    }

    /// Concatenates two bases on disjoint coordinate blocks (`self` first).
    pub fn concat(&self, other: &ScdBasis) -> ScdBasis {
        let mut active = self.active.clone();
        active.extend(other.active.iter().map(|&i| i + self.dim));
        let mut curvature = self.curvature.clone();
        curvature.extend_from_slice(&other.curvature);
        ScdBasis::new(self.dim + other.dim, active, curvature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn projection_and_w_identities() {
        let b = ScdBasis::new(5, vec![0, 3], vec![-0.25, 0.0]);
        let p = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b.p_diagonal()));
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(b.w_diagonal()));
        let id = DMatrix::<f64>::identity(5, 5);
        assert_eq!(&p * &p, p);
        assert_eq!(&w * (&id - &p), &id - &p);
        let joined = b.concat(&ScdBasis::new(2, vec![1], vec![0.5]));
        assert_eq!(joined.active(), &[0, 3, 6]);
        assert_eq!(joined.dim(), 7);
    }
}

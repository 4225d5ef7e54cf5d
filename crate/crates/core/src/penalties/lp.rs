use super::{prox::prox_unchecked, Penalty, ScdBasis, CURVATURE_CAP};
use crate::error::{check_len, Error, Result};
use crate::vecops::{two_prod, Compensated};

/// `g(v) = α Σ wᵢ |vᵢ|^p` with `0^0 := 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpPenalty {
    p: f64,
    weights: Vec<f64>,
    alpha: f64,
}

impl LpPenalty {
    /// `α = 0` is accepted and yields `g ≡ 0`.
    pub fn new(p: f64, weights: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be finite and nonnegative, got {alpha}")));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid(format!("weights must be positive and finite, got {w}")));
        }
        Ok(LpPenalty { p, weights, alpha })
    }

    /// Unit weights on `n` coordinates.
    pub fn uniform(p: f64, n: usize, alpha: f64) -> Result<Self> {
        Self::new(p, vec![1.0; n], alpha)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        let sum: f64 = if self.p == 0.0 {
            v.iter()
                .zip(&self.weights)
                .filter(|(x, _)| **x != 0.0)
                .map(|(_, w)| w)
                .sum()
        } else if self.p == 1.0 {
            v.iter().zip(&self.weights).map(|(x, w)| w * x.abs()).sum()
        } else {
            v.iter()
                .zip(&self.weights)
                .map(|(x, w)| w * x.abs().powf(self.p))
                .sum()
        };
        self.alpha * sum
    }

    /// Componentwise `prox_scalar(p, αλwᵢ, v̂ᵢ)`.
    pub fn prox_vec(&self, lambda: f64, v: &[f64]) -> Result<Vec<f64>> {
        if !(lambda > 0.0) {
            return Err(Error::invalid(format!("prox step must be positive, got {lambda}")));
        }
        check_len("lp prox", self.weights.len(), v.len())?;
        if self.alpha == 0.0 {
            return Ok(v.to_vec());
        }
        Ok(v.iter()
            .zip(&self.weights)
            .map(|(&x, &w)| prox_unchecked(self.p, self.alpha * lambda * w, x))
            .collect())
    }

    /// Active set = support of `z`; curvature `α wᵢ p(p−1)|zᵢ|^{p−2}` for
    /// `p ∈ (0,1)` (clamped at `-CURVATURE_CAP`), zero for `p ∈ {0,1}`.
    /// With `α = 0` every coordinate is active.
    pub fn basis_at(&self, z: &[f64]) -> ScdBasis {
        let active: Vec<usize> = (0..z.len()).filter(|&i| self.alpha == 0.0 || z[i] != 0.0).collect();
        let curvature = active
            .iter()
            .map(|&i| self.curvature_at(i, z[i]))
            .collect();
        ScdBasis::new(z.len(), active, curvature)
    }

    pub(crate) fn curvature_at(&self, i: usize, zi: f64) -> f64 {
        if self.p == 0.0 || self.p == 1.0 {
            0.0
        } else {
            let c = self.alpha * self.weights[i] * self.p * (self.p - 1.0) * zi.abs().powf(self.p - 2.0);
            c.max(-CURVATURE_CAP)
        }
    }
}

impl Penalty for LpPenalty {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, z: &[f64]) -> f64 {
        self.eval(z)
    }

    fn value_compensated(&self, z: &[f64]) -> Compensated {
        let mut acc = Compensated::default();
        for (x, w) in z.iter().zip(&self.weights) {
            if self.p == 0.0 {
                if *x != 0.0 {
                    acc.add(*w);
                }
            } else if self.p == 1.0 {
                acc.add_product(*w, x.abs());
            } else {
                acc.add_product(*w, x.abs().powf(self.p));
            }
        }
        let (hi, e) = two_prod(self.alpha, acc.hi);
        Compensated::new(hi, e + self.alpha * acc.lo)
    }

    fn prox(&self, lambda: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.prox_vec(lambda, v)
    }

    fn scd_basis(&self, z: &[f64], _subgradient: &[f64]) -> ScdBasis {
        self.basis_at(z)
    }

    fn is_convex(&self) -> bool {
        self.p == 1.0 || self.alpha == 0.0
    }
}

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the globalized Newton solver and its proximal-gradient mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Descent-lemma fraction in the model test, in `(0, 1)`.
    pub alpha_ls: f64,
    /// Envelope decrease fraction, in `(0, 1)`.
    pub beta: f64,
    /// Lower model-gap fraction that stops step-size growth, in `(0, 1/2)`.
    pub sigma_ls: f64,
    /// Initial prox step; `None` means `1/L̂` from a power method.
    pub lambda0: Option<f64>,
    /// Step-size ceiling; `None` means `4 λ₀`.
    pub lambda_max: Option<f64>,
    pub rho0: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Stop once `‖z*‖ ≤ tol · max(1, ‖∇f(x₀)‖)`.
    pub tol: f64,
    pub max_iter: usize,
    pub chi_max: f64,
    pub chi_scale: f64,
    pub chi_exponent: f64,
    /// Active sets up to this size are solved with a dense factorization.
    pub direct_cutoff: usize,
    pub power_iterations: usize,
    /// Keep every iterate `x_k` in the report.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha_ls: 0.95,
            beta: 0.5,
            sigma_ls: 0.25,
            lambda0: None,
            lambda_max: None,
            rho0: 1.0,
            rho_min: 1e-3,
            rho_max: 1e3,
            tol: 1e-10,
            max_iter: 500,
            chi_max: 0.5,
            chi_scale: 1.0,
            chi_exponent: 0.5,
            direct_cutoff: 512,
            power_iterations: 20,
            record_iterates: false,
        }
    }
}

fn open_unit(name: &str, v: f64, hi: f64) -> Result<()> {
    if v > 0.0 && v < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, {hi}), got {v}")))
    }
}

impl SolverConfig {
    /// CG tolerance `χ(t) = min(χ_max, κ t^θ)`.
    pub fn chi(&self, t: f64) -> f64 {
        (self.chi_scale * t.max(0.0).powf(self.chi_exponent)).min(self.chi_max)
    }

    pub fn validate(&self) -> Result<()> {
        open_unit("alpha_ls", self.alpha_ls, 1.0)?;
        open_unit("beta", self.beta, 1.0)?;
        open_unit("sigma_ls", self.sigma_ls, 0.5)?;
        open_unit("chi_max", self.chi_max, 1.0)?;
        if !(self.chi_scale > 0.0 && self.chi_exponent > 0.0) {
            return Err(Error::invalid("chi_scale and chi_exponent must be positive"));
        }
        if !(self.rho_min > 0.0 && self.rho_max > self.rho_min) {
            return Err(Error::invalid(format!(
                "need 0 < rho_min < rho_max, got {} and {}",
                self.rho_min, self.rho_max
            )));
        }
        if !(self.rho0 >= self.rho_min && self.rho0 <= self.rho_max) {
            return Err(Error::invalid(format!("rho0 = {} outside [rho_min, rho_max]", self.rho0)));
        }
        for (name, v) in [("lambda0", self.lambda0), ("lambda_max", self.lambda_max)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let (Some(l0), Some(lm)) = (self.lambda0, self.lambda_max) {
            if l0 > lm {
                return Err(Error::invalid("lambda0 exceeds lambda_max"));
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol must be nonnegative"));
        }
        if self.power_iterations == 0 && self.lambda0.is_none() {
            return Err(Error::invalid("power_iterations must be positive when lambda0 is unset"));
        }
        Ok(())
    }
}

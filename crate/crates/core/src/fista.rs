//! Proximal gradient baseline with optional Nesterov momentum (FISTA/ISTA).
//!
//! Log rows share the schema of the Newton solver; `phi` holds `φ(x_k)` and
//! the residual columns come from one diagnostic forward-backward step at
//! `x_k` whose cost is excluded from `time_s`. The returned `x` and `z` are
//! both that final forward-backward point.

use crate::envelope::{t_lambda, CompositeProblem};
use crate::error::{check_len, Error, Result};
use crate::penalties::Penalty;
use crate::smooth::{hessian_norm_estimate, SmoothFunction};
use crate::solver::{DirectionKind, LogRow, SolveReport, Termination};
use crate::vecops::{all_finite, norm};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FistaConfig {
    /// Step `1/L`; `None` uses a power-method estimate of `L`.
    pub step: Option<f64>,
    pub power_iterations: usize,
    pub max_iter: usize,
    /// Stop once `‖z*‖ ≤ tol · max(1, ‖∇f(x₀)‖)`.
    pub tol: f64,
    pub momentum: bool,
    /// Optional budget on solver time in seconds.
    pub time_limit_s: Option<f64>,
    pub record_iterates: bool,
}

impl Default for FistaConfig {
    fn default() -> Self {
        FistaConfig {
            step: None,
            power_iterations: 20,
            max_iter: 100_000,
            tol: 1e-10,
            momentum: true,
            time_limit_s: None,
            record_iterates: false,
        }
    }
}

pub fn solve_fista<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x0: &[f64],
    config: &FistaConfig,
) -> Result<SolveReport> {
    if !prob.penalty().is_convex() {
        return Err(Error::invalid("FISTA requires a convex penalty (p = 1)"));
    }
    check_len("initial point", prob.dim(), x0.len())?;
    if !all_finite(x0) {
        return Err(Error::invalid("initial point has non-finite entries"));
    }
    let wall = Instant::now();
    let step = match config.step {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(Error::invalid(format!("FISTA step must be positive, got {s}"))),
        None => {
            let l = hessian_norm_estimate(prob.smooth(), x0, config.power_iterations.max(1));
            if l > 0.0 && l.is_finite() {
                1.0 / l
            } else {
                1.0
            }
        }
    };

    let mut elapsed = wall.elapsed();
    let scale = norm(&prob.smooth().gradient(x0)).max(1.0);
    let mut x = x0.to_vec();
    let mut w = x0.to_vec();
    let mut t = 1.0f64;
    let mut log = Vec::new();
    let mut iterates = Vec::new();
    let mut iterates_z = Vec::new();

    for k in 0.. {
        let gp = t_lambda(prob, &x, step)?;
        let resid = gp.residual();
        let phi = prob.objective(&x);
        log.push(LogRow {
            iter: k,
            phi,
            phi_fb: gp.envelope(),
            resid,
            lambda: step,
            tau: 1.0,
            rho: 0.0,
            xi: 0.0,
            time_s: elapsed.as_secs_f64(),
            eta: gp.eta(),
            model_gap: gp.step.model_gap(),
            direction: DirectionKind::None,
            step_norm: 0.0,
        });
        if config.record_iterates {
            iterates.push(x.clone());
            iterates_z.push(gp.z().to_vec());
        }
        let termination = if !(phi.is_finite() && resid.is_finite()) {
            Some(Termination::Failed)
        } else if resid <= config.tol * scale {
            Some(Termination::Converged)
        } else if k == config.max_iter || config.time_limit_s.is_some_and(|lim| elapsed.as_secs_f64() >= lim) {
            Some(Termination::MaxIterations)
        } else {
            None
        };
        if let Some(termination) = termination {
            let report = SolveReport {
                x: gp.z().to_vec(),
                z: gp.z().to_vec(),
                residual: resid,
                relative_residual: resid / scale,
                scale,
                iterations: k,
                lambda0: step,
                termination,
                wall_time_s: wall.elapsed().as_secs_f64(),
                log,
                iterates,
                iterates_z,
            };
            if termination == Termination::Failed {
                return Err(Error::NonFinite {
                    iteration: k,
                    what: format!("objective {phi}"),
                    report: Box::new(report),
                });
            }
            return Ok(report);
        }

        let started = Instant::now();
        let g = prob.smooth().gradient(&w);
        let fwd: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
        let next = prob.penalty().prox(step, &fwd)?;
        if config.momentum {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let m = (t - 1.0) / t_next;
            w = next.iter().zip(&x).map(|(a, b)| a + m * (a - b)).collect();
            t = t_next;
        } else {
            w.clone_from(&next);
        }
        x = next;
        elapsed += started.elapsed();
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::DMatrix;
    use crate::penalties::LpPenalty;
    use crate::smooth::LeastSquares;
    use crate::vecops::dist;

    fn lasso_2d() -> CompositeProblem<LeastSquares<DMatrix<f64>>, LpPenalty> {
        let f = LeastSquares::new(DMatrix::identity(2, 2), vec![2.0, 0.1]).unwrap();
        CompositeProblem::new(f, LpPenalty::uniform(1.0, 2, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn scalar_quadratic() {
        let f = LeastSquares::new(DMatrix::from_element(1, 1, 1.0), vec![1.0]).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::new(1.0, vec![1e-16], 1.0).unwrap()).unwrap();
        let r = solve_fista(&prob, &[5.0], &FistaConfig::default()).unwrap();
        assert!(r.converged());
        assert!((r.x[0] - 1.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn lasso_closed_form() {
        for momentum in [true, false] {
            let cfg = FistaConfig { momentum, ..Default::default() };
            let r = solve_fista(&lasso_2d(), &[0.0, 0.0], &cfg).unwrap();
            assert!(dist(&r.x, &[1.5, 0.0]) <= 1e-6);
            assert_eq!(r.log.len(), r.iterations + 1);
        }
    }

    #[test]
    fn ista_is_monotone() {
        let inst = crate::instances::sparse_recovery(30, 60, 4, 0.01, 3);
        let f = LeastSquares::new(inst.a, inst.y).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(1.0, 60, 0.1 * inst.alpha_max).unwrap()).unwrap();
        let cfg = FistaConfig { momentum: false, max_iter: 2000, ..Default::default() };
        let r = solve_fista(&prob, &vec![0.0; 60], &cfg).unwrap();
        for w in r.log.windows(2) {
            assert!(w[1].phi <= w[0].phi * (1.0 + 1e-14));
        }
    }

    #[test]
    fn rejects_nonconvex_penalty() {
        let f = LeastSquares::new(DMatrix::identity(2, 2), vec![1.0, 1.0]).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(0.5, 2, 1.0).unwrap()).unwrap();
        assert!(matches!(solve_fista(&prob, &[0.0, 0.0], &FistaConfig::default()), Err(Error::InvalidArgument(_))));
    }
}

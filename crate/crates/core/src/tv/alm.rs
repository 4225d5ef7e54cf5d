use super::difference::{tv_of, DifferenceOperator};
use super::inner::assemble;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::solver::{solve, LogRow, SolveReport, SolverConfig};
use crate::tomo::ImageGrid;
use crate::vecops::{norm, norm_sq};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

/// Outer-loop parameters of the augmented Lagrangian method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TvConfig {
    pub sigma0: f64,
    /// Inflation factor for `σ`, `> 1`.
    pub sigma_growth: f64,
    /// `σ` grows when feasibility shrinks by less than this ratio, in `(0, 1)`.
    pub shrink_ratio: f64,
    /// Target for `‖Bx − v‖`.
    pub feas_tol: f64,
    /// Target for the inner relative residual at termination.
    pub inner_tol: f64,
    pub max_outer: usize,
    /// Inner tolerance is `max(inner_floor, inner_factor · ‖Bx − v‖)`.
    pub inner_floor: f64,
    pub inner_factor: f64,
}

impl Default for TvConfig {
    fn default() -> Self {
        TvConfig {
            sigma0: 1.0,
            sigma_growth: 10.0,
            shrink_ratio: 0.25,
            feas_tol: 1e-8,
            inner_tol: 1e-8,
            max_outer: 50,
            inner_floor: 1e-10,
            inner_factor: 0.1,
        }
    }
}

impl TvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::invalid("sigma0 must be positive"));
        }
        if !(self.sigma_growth > 1.0) {
            return Err(Error::invalid("sigma_growth must exceed 1"));
        }
        if !(self.shrink_ratio > 0.0 && self.shrink_ratio < 1.0) {
            return Err(Error::invalid("shrink_ratio must lie in (0, 1)"));
        }
        if !(self.feas_tol > 0.0 && self.inner_tol > 0.0 && self.inner_floor > 0.0 && self.inner_factor > 0.0) {
            return Err(Error::invalid("TV tolerances must be positive"));
        }
        if self.max_outer == 0 {
            return Err(Error::invalid("max_outer must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRow {
    pub outer_iter: usize,
    /// `σ` used for this subproblem.
    pub sigma: f64,
    /// `‖Bx − v‖` after the subproblem.
    pub feas: f64,
    pub inner_iters: usize,
    /// `‖Ax − y‖² + α TV(x)`.
    pub objective: f64,
    pub inner_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TvReport {
    #[serde(skip)]
    pub image: ImageGrid,
    pub v: Vec<f64>,
    pub multiplier: Vec<f64>,
    pub sigma: f64,
    pub feasibility: f64,
    pub objective: f64,
    pub tv: f64,
    pub misfit: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    pub outer_log: Vec<OuterRow>,
    pub last_inner: SolveReport,
    /// Iteration logs of every inner solve, in outer order.
    #[serde(skip)]
    pub inner_logs: Vec<Vec<LogRow>>,
}

/// Scalar summary of a TV run, suitable for regression fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvSummary {
    pub n1: usize,
    pub n2: usize,
    pub objective: f64,
    pub tv: f64,
    pub misfit: f64,
    pub feasibility: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub sigma: f64,
    pub converged: bool,
}

impl TvReport {
    pub fn summary(&self) -> TvSummary {
        TvSummary {
            n1: self.image.n1(),
            n2: self.image.n2(),
            objective: self.objective,
            tv: self.tv,
            misfit: self.misfit,
            feasibility: self.feasibility,
            outer_iterations: self.outer_iterations,
            inner_iterations: self.inner_iterations,
            sigma: self.sigma,
            converged: self.converged,
        }
    }

    pub fn write_outer_log_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "outer_iter,sigma,feas,inner_iters,objective")?;
        for r in &self.outer_log {
            writeln!(out, "{},{:e},{:e},{},{:e}", r.outer_iter, r.sigma, r.feas, r.inner_iters, r.objective)?;
        }
        Ok(())
    }
}

/// Minimizes `‖Ax − y‖² + α TV(x)` over `n1 × n2` images from `x = 0`.
pub fn solve_tv<A: LinearOperator + ?Sized>(
    a: &A,
    y: &[f64],
    alpha: f64,
    n1: usize,
    n2: usize,
    config: &TvConfig,
    inner: &SolverConfig,
) -> Result<TvReport> {
    solve_tv_from(a, y, alpha, n1, n2, &vec![0.0; n1 * n2], config, inner)
}

#[allow(clippy::too_many_arguments)]
pub fn solve_tv_from<A: LinearOperator + ?Sized>(
    a: &A,
    y: &[f64],
    alpha: f64,
    n1: usize,
    n2: usize,
    x0: &[f64],
    config: &TvConfig,
    inner: &SolverConfig,
) -> Result<TvReport> {
    config.validate()?;
    inner.validate()?;
    let b = DifferenceOperator::new(n1, n2)?;
    check_len("tv operator columns", n1 * n2, a.ncols())?;
    check_len("tv initial image", n1 * n2, x0.len())?;
    let clock = Instant::now();
    let norms = a.column_norms_sq();
    let n = n1 * n2;
    let s = b.nrows();

    let mut w = x0.to_vec();
    w.extend(b.apply(x0));
    let mut multiplier = vec![0.0; s];
    let mut sigma = config.sigma0;
    let mut prev_feas: Option<f64> = None;
    let mut log = Vec::new();
    let mut inner_total = 0;
    let mut inner_logs = Vec::new();
    let mut inner_cfg = inner.clone();

    for k in 0..config.max_outer {
        inner_cfg.tol = config.inner_floor.max(config.inner_factor * prev_feas.unwrap_or(1.0));
        let prob = assemble(a, y, alpha, &b, multiplier.clone(), sigma, Some(&norms))?;
        let report = solve(&prob, &w, &inner_cfg).map_err(|e| e.context(format!("TV outer iteration {k}")))?;
        inner_total += report.iterations;
        inner_logs.push(report.log.clone());
        w = report.z.clone();
        let (x, v) = w.split_at(n);
        let mut c = b.apply(x);
        c.iter_mut().zip(v).for_each(|(ci, vi)| *ci -= vi);
        let feas = norm(&c);
        let misfit = misfit(a, x, y);
        let tv = tv_of(x, n1, n2);
        log.push(OuterRow {
            outer_iter: k,
            sigma,
            feas,
            inner_iters: report.iterations,
            objective: misfit + alpha * tv,
            inner_residual: report.relative_residual,
        });
        for (m, ci) in multiplier.iter_mut().zip(&c) {
            *m += sigma * ci;
        }
        let converged = feas <= config.feas_tol && report.relative_residual <= config.inner_tol;
        if converged || k + 1 == config.max_outer {
            let image = ImageGrid::new(n1, n2, x.to_vec())?;
            return Ok(TvReport {
                image,
                v: v.to_vec(),
                multiplier,
                sigma,
                feasibility: feas,
                objective: misfit + alpha * tv,
                tv,
                misfit,
                outer_iterations: k + 1,
                inner_iterations: inner_total,
                converged,
                wall_time_s: clock.elapsed().as_secs_f64(),
                outer_log: log,
                last_inner: report,
                inner_logs,
            });
        }
        if prev_feas.is_some_and(|p| feas > config.shrink_ratio * p) {
            sigma *= config.sigma_growth;
        }
        prev_feas = Some(feas);
    }
    unreachable!("max_outer is positive")
}

fn misfit<A: LinearOperator + ?Sized>(a: &A, x: &[f64], y: &[f64]) -> f64 {
    let mut r = a.apply(x);
    r.iter_mut().zip(y).for_each(|(ri, yi)| *ri -= yi);
    norm_sq(&r)
}

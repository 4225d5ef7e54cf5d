use super::config::SolverConfig;
use super::newton::{newton_direction, Direction};
use super::report::{DirectionKind, LogRow, SolveReport, Termination};
use crate::envelope::{prox_step, Anchor, CompositeProblem, GraphPoint, ProxStep};
use crate::error::{check_len, Error, Result};
use crate::penalties::Penalty;
use crate::smooth::{hessian_norm_estimate, SmoothFunction};
use crate::vecops::{all_finite, norm, Compensated};
use std::time::Instant;

/// Smallest admissible line-search step, `2^-60`.
pub const MIN_STEP: f64 = 8.673617379884035e-19;

/// Relative floating-point slack allowed in the line-search comparisons.
pub const ROUNDING_SLACK: f64 = 16.0 * f64::EPSILON;

/// Envelope values switch to double-double once `η ≤ COMPENSATE_BELOW · |ψ|`.
const COMPENSATE_BELOW: f64 = 1.5e-8;

/// Extra halvings of `τ` spent looking for an exactly verified decrease.
const EXACT_RETRIES: usize = 4;

fn slack(a: f64, b: f64) -> f64 {
    ROUNDING_SLACK * (a.abs() + b.abs())
}

/// `ψ(x_{k+1}) ≤ target` up to rounding in `current`.
pub fn envelope_decreased(candidate: f64, target: f64, current: f64) -> bool {
    candidate <= target + slack(current, 0.0)
}

/// `f(z) ≤ ℓ_f(x, z) + α η` up to rounding.
pub fn descent_holds(step: &ProxStep, alpha: f64) -> bool {
    step.fz <= step.linearization + alpha * step.eta + slack(step.fz, step.linearization)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Newton,
    ProxGradient,
}

/// Globalized SCD semismooth* Newton method on `φ = f + g` from `x0`.
pub fn solve<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    Run::start(prob, x0, config, Mode::Newton)?.iterate()
}

/// The same globalization with the Newton step forced to zero, i.e. `x_{k+1} = z_k`.
pub fn solve_pgm<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport> {
    Run::start(prob, x0, config, Mode::ProxGradient)?.iterate()
}

struct Run<'a, F, G> {
    prob: &'a CompositeProblem<F, G>,
    config: &'a SolverConfig,
    mode: Mode,
    clock: Instant,
    scale: f64,
    lambda0: f64,
    lambda_max: f64,
    gp: GraphPoint,
    rho: f64,
    tau: f64,
    compensated: bool,
    log: Vec<LogRow>,
    iterates: Vec<Vec<f64>>,
    iterates_z: Vec<Vec<f64>>,
}

impl<'a, F: SmoothFunction, G: Penalty> Run<'a, F, G> {
    fn start(prob: &'a CompositeProblem<F, G>, x0: &[f64], config: &'a SolverConfig, mode: Mode) -> Result<Self> {
        config.validate()?;
        check_len("initial point", prob.dim(), x0.len())?;
        if !all_finite(x0) {
            return Err(Error::invalid("initial point has non-finite entries"));
        }
        let clock = Instant::now();
        let anchor = Anchor::plain(prob, x0.to_vec())?;
        let scale = norm(&anchor.grad).max(1.0);
        let mut lambda0 = config.lambda0.unwrap_or_else(|| {
            let l = hessian_norm_estimate(prob.smooth(), x0, config.power_iterations);
            if l > 0.0 && l.is_finite() {
                1.0 / l
            } else {
                1.0
            }
        });
        let lambda_max = config.lambda_max.unwrap_or(4.0 * lambda0);
        lambda0 = lambda0.min(lambda_max);

        let mut lambda = lambda0;
        let mut step = prox_step(prob, &anchor, lambda)?;
        while !descent_holds(&step, config.alpha_ls) {
            lambda *= 0.5;
            if lambda < lambda0 * MIN_STEP || !anchor.fx.is_finite() {
                let gp = GraphPoint::complete(prob, anchor, step);
                let reason = "no initial step size satisfies the descent test".to_string();
                return Err(Error::Stagnation {
                    iteration: 0,
                    reason,
                    report: Box::new(bare_report(&gp, scale, lambda0, clock)),
                });
            }
            step = prox_step(prob, &anchor, lambda)?;
        }
        let gp = GraphPoint::complete(prob, anchor, step);
        let (iterates, iterates_z) = if config.record_iterates {
            (vec![x0.to_vec()], vec![gp.z().to_vec()])
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Run {
            prob,
            config,
            mode,
            clock,
            scale,
            lambda0,
            lambda_max,
            gp,
            rho: config.rho0,
            tau: 1.0,
            compensated: false,
            log: Vec::new(),
            iterates,
            iterates_z,
        })
    }

    fn iterate(mut self) -> Result<SolveReport> {
        let cfg = self.config;
        let (alpha, beta) = (cfg.alpha_ls, cfg.beta);
        for k in 0.. {
            let resid = self.gp.residual();
            if !(self.gp.phi().is_finite() && self.gp.envelope().is_finite() && resid.is_finite()) {
                self.push_row(k, None);
                let what = format!("objective {} / envelope {}", self.gp.phi(), self.gp.envelope());
                return Err(Error::NonFinite {
                    iteration: k,
                    what,
                    report: Box::new(self.finish(k, Termination::Failed)),
                });
            }
            if resid <= cfg.tol * self.scale {
                self.push_row(k, None);
                return Ok(self.finish(k, Termination::Converged));
            }
            if k == cfg.max_iter {
                self.push_row(k, None);
                return Ok(self.finish(k, Termination::MaxIterations));
            }

            let direction = match self.mode {
                Mode::Newton => {
                    let basis = self.prob.penalty().scd_basis(self.gp.z(), &self.gp.z_star_g);
                    let chi_tol = cfg.chi(resid / self.scale);
                    Some(newton_direction(self.prob, &self.gp, &basis, self.rho, chi_tol, cfg.direct_cutoff))
                }
                Mode::ProxGradient => None,
            };
            self.push_row(k, direction.as_ref());

            let current = self.gp.envelope();
            self.compensated |= self.gp.eta() <= COMPENSATE_BELOW * current.abs();
            let target = current - beta * (1.0 - alpha) * self.gp.eta();
            let (anchor, step, tau) = match self.line_search(direction.as_ref(), target, current) {
                Ok(found) => found,
                Err(reason) => {
                    return Err(Error::Stagnation {
                        iteration: k,
                        reason,
                        report: Box::new(self.finish(k, Termination::Failed)),
                    })
                }
            };
            let step = self.grow_step(&anchor, step, target)?;

            if let Some(d) = &direction {
                let s_norm = d.norm();
                if tau < 0.25 {
                    self.rho = (0.25 * self.rho).max(cfg.rho_min);
                } else if tau == 1.0 && s_norm >= self.rho * (1.0 - 1e-12) {
                    self.rho = (2.0 * self.rho).min(cfg.rho_max);
                }
            }
            self.tau = tau;
            self.gp = GraphPoint::complete(self.prob, anchor, step);
            if cfg.record_iterates {
                self.iterates.push(self.gp.x().to_vec());
                self.iterates_z.push(self.gp.z().to_vec());
            }
        }
        unreachable!()
    }

    fn value_at(&self, x: &[f64]) -> Compensated {
        let f = self.prob.smooth();
        if self.compensated {
            f.value_compensated(x)
        } else {
            Compensated::new(f.value(x), 0.0)
        }
    }

    /// Halves `τ` until the envelope decreases enough, and `λ` until the descent test holds.
    fn line_search(&self, direction: Option<&Direction>, target: f64, current: f64) -> Result<(Anchor, ProxStep, f64), String> {
        let alpha = self.config.alpha_ls;
        let z = self.gp.z();
        let mut tau = 1.0;
        let mut lambda = self.gp.lambda();
        let f = self.prob.smooth();
        // along z + τs the gradient of a quadratic is ∇f(z) + τ Hs
        let hs = direction
            .filter(|_| f.is_quadratic())
            .map(|d| f.hessian_apply(z, &d.s));
        let trial_anchor = |tau: f64| -> Result<Anchor, String> {
            let Some(d) = direction else {
                let fx = self.value_at(z);
                return Ok(Anchor::from_parts(z.to_vec(), fx, self.gp.grad_z.clone()));
            };
            let x: Vec<f64> = z.iter().zip(&d.s).map(|(zi, si)| zi + tau * si).collect();
            match &hs {
                Some(hs) => {
                    let fx = self.value_at(&x);
                    let grad = self.gp.grad_z.iter().zip(hs).map(|(g, h)| g + tau * h).collect();
                    Ok(Anchor::from_parts(x, fx, grad))
                }
                None if self.compensated => Anchor::new(self.prob, x).map_err(|e| e.to_string()),
                None => Anchor::plain(self.prob, x).map_err(|e| e.to_string()),
            }
        };
        let mut anchor = trial_anchor(tau)?;
        // a decrease that holds only within rounding is kept as a fallback
        // while a few more halvings of τ look for one that holds exactly
        let mut fallback: Option<(Anchor, ProxStep, f64)> = None;
        let mut retries = if direction.is_some() { EXACT_RETRIES } else { 0 };
        loop {
            let step = prox_step(self.prob, &anchor, lambda).map_err(|e| e.to_string())?;
            let within_rounding = envelope_decreased(step.envelope, target, current);
            if within_rounding && !descent_holds(&step, alpha) {
                lambda *= 0.5;
                if lambda < self.lambda0 * MIN_STEP {
                    return fallback.ok_or_else(|| "prox step size fell below 2^-60 λ₀".to_string());
                }
                continue;
            }
            if within_rounding && step.envelope <= target {
                return Ok((anchor, step, tau));
            }
            if within_rounding && fallback.is_none() {
                fallback = Some((anchor.clone(), step.clone(), tau));
            }
            if let Some(found) = &fallback {
                if retries == 0 {
                    return Ok(found.clone());
                }
                retries -= 1;
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                return fallback.ok_or_else(|| format!("step size fell below 2^-60 (envelope {} vs target {target})", step.envelope));
            }
            anchor = trial_anchor(tau)?;
        }
    }

    /// Doubles `λ` while the model gap is small, `λ ≤ λ̄/2`, and the descent test still holds at `2λ`.
    fn grow_step(&self, anchor: &Anchor, mut step: ProxStep, target: f64) -> Result<ProxStep> {
        let cfg = self.config;
        let alpha = cfg.alpha_ls;
        loop {
            let gap_large = step.model_gap() >= cfg.sigma_ls * alpha * step.eta;
            let near_cap = step.lambda > 0.5 * self.lambda_max;
            if gap_large || near_cap {
                return Ok(step);
            }
            let trial = prox_step(self.prob, anchor, 2.0 * step.lambda)?;
            let fails_descent = trial.fz >= trial.linearization + alpha * trial.eta;
            if fails_descent || trial.envelope > step.envelope.max(target) {
                return Ok(step);
            }
            step = trial;
        }
    }

    fn push_row(&mut self, k: usize, direction: Option<&Direction>) {
        let gp = &self.gp;
        self.log.push(LogRow {
            iter: k,
            phi: gp.phi(),
            phi_fb: gp.envelope(),
            resid: gp.residual(),
            lambda: gp.lambda(),
            tau: self.tau,
            rho: self.rho,
            xi: direction.map_or(0.0, |d| d.xi),
            time_s: self.clock.elapsed().as_secs_f64(),
            eta: gp.eta(),
            model_gap: gp.step.model_gap(),
            direction: direction.map_or(DirectionKind::None, |d| d.kind),
            step_norm: direction.map_or(0.0, |d| d.norm()),
        });
    }

    fn finish(&mut self, k: usize, termination: Termination) -> SolveReport {
        let residual = self.gp.residual();
        SolveReport {
            x: self.gp.x().to_vec(),
            z: self.gp.z().to_vec(),
            residual,
            relative_residual: residual / self.scale,
            scale: self.scale,
            iterations: k,
            lambda0: self.lambda0,
            termination,
            wall_time_s: self.clock.elapsed().as_secs_f64(),
            log: std::mem::take(&mut self.log),
            iterates: std::mem::take(&mut self.iterates),
            iterates_z: std::mem::take(&mut self.iterates_z),
        }
    }
}

fn bare_report(gp: &GraphPoint, scale: f64, lambda0: f64, clock: Instant) -> SolveReport {
    SolveReport {
        x: gp.x().to_vec(),
        z: gp.z().to_vec(),
        residual: gp.residual(),
        relative_residual: gp.residual() / scale,
        scale,
        iterations: 0,
        lambda0,
        termination: Termination::Failed,
        wall_time_s: clock.elapsed().as_secs_f64(),
        log: Vec::new(),
        iterates: Vec::new(),
        iterates_z: Vec::new(),
    }
}

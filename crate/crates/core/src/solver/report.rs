use serde::{Deserialize, Serialize};
use std::io::Write;

/// How the Newton direction of an iteration was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionKind {
    /// No direction (proximal-gradient mode or final row).
    None,
    Direct,
    ConjugateGradient,
    /// Scaled negative projected residual.
    Fallback,
}

/// One row of the iteration log; row `k` describes the graph point at `x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub iter: usize,
    /// `φ(z_k)`.
    pub phi: f64,
    /// `φ_λ^FB(x_k)`.
    pub phi_fb: f64,
    /// `‖z*_k‖`.
    pub resid: f64,
    pub lambda: f64,
    /// Step size that produced `x_k` (1 on the first row).
    pub tau: f64,
    pub rho: f64,
    /// Relative residual of the direction computed at `z_k` (0 if none).
    pub xi: f64,
    pub time_s: f64,
    pub eta: f64,
    /// `f(z_k) − ℓ_f(x_k, z_k)`.
    pub model_gap: f64,
    pub direction: DirectionKind,
    pub step_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// Partial report attached to an error.
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// `‖z*‖` at the final graph point.
    pub residual: f64,
    /// `residual / max(1, ‖∇f(x₀)‖)`.
    pub relative_residual: f64,
    pub scale: f64,
    pub iterations: usize,
    pub lambda0: f64,
    pub termination: Termination,
    pub wall_time_s: f64,
    pub log: Vec<LogRow>,
    /// `x_k` for every row of the log, when recording was requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vec<f64>>,
    /// `z_k` for every row of the log, when recording was requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates_z: Vec<Vec<f64>>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    /// `φ(z)` at the final point.
    pub fn objective(&self) -> f64 {
        self.log.last().map_or(f64::NAN, |r| r.phi)
    }

    pub fn write_log_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_log_csv(&self.log, out)
    }
}

pub const LOG_HEADER: &str = "iter,phi,phi_fb,resid,lambda,tau,rho,xi,time_s";

pub fn write_log_csv<W: Write>(rows: &[LogRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{LOG_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.iter, r.phi, r.phi_fb, r.resid, r.lambda, r.tau, r.rho, r.xi, r.time_s
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_fixed_columns() {
        let row = LogRow {
            iter: 0,
            phi: 1.5,
            phi_fb: 1.25,
            resid: 0.5,
            lambda: 0.25,
            tau: 1.0,
            rho: 1.0,
            xi: 0.0,
            time_s: 0.0,
            eta: 0.0,
            model_gap: 0.0,
            direction: DirectionKind::None,
            step_norm: 0.0,
        };
        let mut buf = Vec::new();
        write_log_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), LOG_HEADER);
        let fields: Vec<f64> = lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields, vec![0.0, 1.5, 1.25, 0.5, 0.25, 1.0, 1.0, 0.0, 0.0]);
    }
}

use super::LpPenalty;
use crate::error::{check_len, Error, Result};
use crate::linalg::smallest_singular_value;
use crate::linops::{to_dense, LinearOperator};
use nalgebra::DMatrix;
use serde::Serialize;

/// Largest dimension for which the subset enumeration is attempted.
pub const MAX_ENUMERATION_DIM: usize = 20;

/// Smallest singular value at or below which a matrix is reported singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

/// Relative tolerance used to decide the degenerate index sets.
pub(crate) const DEGENERACY_TOL: f64 = 1e-8;

/// Outcome of an SCD regularity test at a candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// Indices that must be active (the support).
    pub lower: Vec<usize>,
    /// Indices that may be active.
    pub upper: Vec<usize>,
    pub subsets_checked: usize,
    /// Smallest singular value over all checked matrices.
    pub min_singular_value: f64,
    /// First index set whose matrix is singular, if any.
    pub failing: Option<Vec<usize>>,
}

/// Enumerates every `I` with `lower ⊆ I ⊆ upper` and evaluates `matrix(I)`.
pub(crate) fn enumerate_subsets(
    lower: Vec<usize>,
    upper: Vec<usize>,
    mut matrix: impl FnMut(&[usize]) -> DMatrix<f64>,
) -> RegularityReport {
    let free: Vec<usize> = upper.iter().copied().filter(|i| !lower.contains(i)).collect();
    let mut min_sv = f64::INFINITY;
    let mut failing = None;
    let count = 1usize << free.len();
    for mask in 0..count {
        let mut set: Vec<usize> = lower.clone();
        set.extend(
            free.iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &i)| i),
        );
        set.sort_unstable();
        let sv = smallest_singular_value(&matrix(&set));
        min_sv = min_sv.min(sv);
        if sv <= SINGULAR_THRESHOLD && failing.is_none() {
            failing = Some(set);
        }
    }
    RegularityReport {
        regular: failing.is_none(),
        lower,
        upper,
        subsets_checked: count,
        min_singular_value: min_sv,
        failing,
    }
}

/// SCD regularity of `v ↦ ‖Ãv − y‖² + g(v)` at `v̄`, given `r̄ = ∇f(v̄)`.
///
/// Checks nonsingularity of `2 P Ã^T Ã P + W` for every admissible active set.
pub fn check_scd_regularity(
    a: &dyn LinearOperator,
    g: &LpPenalty,
    v_bar: &[f64],
    r_bar: &[f64],
) -> Result<RegularityReport> {
    let n = a.ncols();
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::TooLarge(format!(
            "regularity enumeration supports at most {MAX_ENUMERATION_DIM} unknowns, got {n}; \
             the number of candidate index sets grows as 2^n"
        )));
    }
    check_len("regularity v_bar", n, v_bar.len())?;
    check_len("regularity r_bar", n, r_bar.len())?;
    check_len("regularity weights", n, g.weights().len())?;

    let lower: Vec<usize> = (0..n).filter(|&i| v_bar[i] != 0.0).collect();
    let p = g.p();
    let mut upper = lower.clone();
    for i in 0..n {
        if v_bar[i] != 0.0 {
            continue;
        }
        let extra = if p == 1.0 {
            let t = g.alpha() * g.weights()[i];
            (r_bar[i].abs() - t).abs() <= DEGENERACY_TOL * t.max(1.0)
        } else if p == 0.0 {
            r_bar[i].abs() <= DEGENERACY_TOL
        } else {
            false
        };
        if extra {
            upper.push(i);
        }
    }
    upper.sort_unstable();

    let dense = to_dense(a);
    let gram = dense.transpose() * &dense;
    Ok(enumerate_subsets(lower, upper, |set| {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        for &i in set {
            for &j in set {
                m[(i, j)] = 2.0 * gram[(i, j)];
            }
            m[(i, i)] += g.curvature_at(i, v_bar[i]);
        }
        m
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::Identity;

    #[test]
    fn identity_is_regular() {
        let g = LpPenalty::uniform(1.0, 3, 1.0).unwrap();
        let r = check_scd_regularity(&Identity::new(3), &g, &[1.0, 0.0, -2.0], &[-1.0, 1.0, 1.0]).unwrap();
        assert!(r.regular);
        assert_eq!(r.lower, vec![0, 2]);
        assert_eq!(r.upper, vec![0, 1, 2]);
        assert_eq!(r.subsets_checked, 2);
    }

    #[test]
    fn zero_column_is_singular_when_active() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let g = LpPenalty::uniform(0.0, 2, 1.0).unwrap();
        let r = check_scd_regularity(&a, &g, &[0.0, 1.0], &[0.5, 0.0]).unwrap();
        assert!(!r.regular);
        assert_eq!(r.failing, Some(vec![1]));
    }

    #[test]
    fn refuses_large_instances() {
        let g = LpPenalty::uniform(1.0, 21, 1.0).unwrap();
        let err = check_scd_regularity(&Identity::new(21), &g, &[0.0; 21], &[0.0; 21]).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)));
    }
}

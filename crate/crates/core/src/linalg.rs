//! Dense factorization helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Pivot ratio below which a square matrix is treated as numerically singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

pub fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Solves the symmetric system `m x = b`. Tries Cholesky first, falls back to
/// partial-pivot LU; returns `None` when the LU pivots indicate singularity.
pub fn solve_symmetric(m: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    if let Some(ch) = m.clone().cholesky() {
        let x = ch.solve(&rhs);
        if x.iter().all(|v| v.is_finite()) {
            return Some(x.as_slice().to_vec());
        }
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let (lo, hi) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d.abs()), hi.max(d.abs())));
    if hi == 0.0 || lo <= SINGULAR_PIVOT_RATIO * hi {
        return None;
    }
    let x = lu.solve(&rhs)?;
    x.iter()
        .all(|v| v.is_finite())
        .then(|| x.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_indefinite_and_detects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let x = solve_symmetric(&m, &[3.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(solve_symmetric(&s, &[1.0, 0.0]).is_none());
        assert!(smallest_singular_value(&s) < 1e-15);
    }
}

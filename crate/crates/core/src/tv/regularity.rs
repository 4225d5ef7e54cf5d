use super::DifferenceOperator;
use crate::error::{check_len, Error, Result};
use crate::linops::{to_dense, LinearOperator};
use crate::penalties::regularity::{enumerate_subsets, DEGENERACY_TOL};
use crate::penalties::{RegularityReport, MAX_ENUMERATION_DIM};
use nalgebra::DMatrix;

/// SCD regularity of the TV subproblem at `(x̄, v̄)` with multiplier estimate `r̄`.
///
/// For every admissible active set `I` of the split variable, checks that
/// `[[AᵀA + σBᵀB, −σBᵀP], [−σPB, σP + W]]` is nonsingular, where `P`
/// selects `I` and `W = I − P`.
#[allow(clippy::too_many_arguments)]
pub fn check_tv_regularity(
    a: &dyn LinearOperator,
    b: &DifferenceOperator,
    x_bar: &[f64],
    v_bar: &[f64],
    r_bar: &[f64],
    sigma: f64,
    alpha: f64,
) -> Result<RegularityReport> {
    let n = b.ncols();
    let s = b.nrows();
    if s > MAX_ENUMERATION_DIM {
        return Err(Error::TooLarge(format!(
            "TV regularity enumeration supports at most {MAX_ENUMERATION_DIM} differences, got {s}"
        )));
    }
    check_len("tv regularity operator", n, a.ncols())?;
    check_len("tv regularity x_bar", n, x_bar.len())?;
    check_len("tv regularity v_bar", s, v_bar.len())?;
    check_len("tv regularity r_bar", s, r_bar.len())?;
    if !(sigma >= 0.0) {
        return Err(Error::invalid("sigma must be nonnegative"));
    }

    let lower: Vec<usize> = (0..s).filter(|&i| v_bar[i] != 0.0).collect();
    let mut upper = lower.clone();
    upper.extend((0..s).filter(|&i| {
        v_bar[i] == 0.0 && (r_bar[i].abs() - alpha).abs() <= DEGENERACY_TOL * alpha.max(1.0)
    }));
    upper.sort_unstable();

    let ad = to_dense(a);
    let bd = to_dense(b);
    let top_left = ad.transpose() * &ad + (bd.transpose() * &bd) * sigma;
    let report = enumerate_subsets(lower, upper, |set| {
        let mut m = DMatrix::zeros(n + s, n + s);
        m.view_mut((0, 0), (n, n)).copy_from(&top_left);
        for r in 0..s {
            m[(n + r, n + r)] = 1.0;
        }
        for &r in set {
            for j in 0..n {
                m[(j, n + r)] = -sigma * bd[(r, j)];
                m[(n + r, j)] = -sigma * bd[(r, j)];
            }
            m[(n + r, n + r)] = sigma;
        }
        m
    });
    Ok(report)
}

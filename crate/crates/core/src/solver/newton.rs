use super::report::DirectionKind;
use crate::envelope::{CompositeProblem, GraphPoint};
use crate::linalg::solve_symmetric;
use crate::penalties::{Penalty, ScdBasis};
use crate::smooth::SmoothFunction;
use crate::vecops::{axpy, dot, norm};

/// A Newton direction `s ∈ rge P` with `‖s‖ ≤ ρ` and its relative residual.
#[derive(Debug, Clone)]
pub struct Direction {
    pub s: Vec<f64>,
    pub xi: f64,
    pub kind: DirectionKind,
    pub cg_iterations: usize,
}

impl Direction {
    fn zero(n: usize) -> Self {
        Direction {
            s: vec![0.0; n],
            xi: 0.0,
            kind: DirectionKind::Fallback,
            cg_iterations: 0,
        }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.s)
    }
}

/// Solves `(∇²f(z)_II + diag(c_I)) s_I = −z*_I` on the active set of `basis`,
/// directly for `|I| ≤ direct_cutoff` and by truncated CG otherwise.
pub fn newton_direction<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    gp: &GraphPoint,
    basis: &ScdBasis,
    rho: f64,
    chi_tol: f64,
    direct_cutoff: usize,
) -> Direction {
    let n = prob.dim();
    let active = basis.active();
    let curvature = basis.curvature();
    let z = gp.z();
    let zs_norm = gp.residual();
    let rhs: Vec<f64> = active.iter().map(|&i| -gp.z_star[i]).collect();
    let rhs_norm = norm(&rhs);
    if active.is_empty() || rhs_norm == 0.0 {
        return Direction::zero(n);
    }
    let f = prob.smooth();
    let reduced_apply = |u: &[f64]| -> Vec<f64> {
        let mut h = f.reduced_hessian_apply(z, active, u);
        h.iter_mut().zip(u.iter().zip(curvature)).for_each(|(hv, (&v, &c))| *hv += c * v);
        h
    };
    let fallback = || rhs.iter().map(|v| rho * v / rhs_norm).collect::<Vec<f64>>();

    let iterative = || {
        let precond = f.hessian_diagonal(z).and_then(|d| {
            let inv: Vec<f64> = active
                .iter()
                .zip(curvature)
                .map(|(&i, &c)| 1.0 / (d[i] + c))
                .collect();
            inv.iter().all(|v| *v > 0.0 && v.is_finite()).then_some(inv)
        });
        let max_iter = 2 * active.len() + 50;
        let (u, iters) = steihaug(reduced_apply, &rhs, precond.as_deref(), rho, chi_tol * zs_norm, max_iter);
        if norm(&u) == 0.0 {
            (fallback(), DirectionKind::Fallback, iters)
        } else {
            (u, DirectionKind::ConjugateGradient, iters)
        }
    };

    let surely_singular = curvature.iter().all(|&c| c == 0.0)
        && f.hessian_rank_bound().is_some_and(|r| active.len() > r);
    let direct = (active.len() <= direct_cutoff && !surely_singular)
        .then(|| {
            let mut m = f.reduced_hessian(z, active);
            for (k, &c) in curvature.iter().enumerate() {
                m[(k, k)] += c;
            }
            solve_symmetric(&m, &rhs).map(|u| (m, u))
        })
        .flatten();
    let (u, kind, cg_iterations, mut residual) = match direct {
        Some((m, mut u)) => {
            let len = norm(&u);
            if len > rho {
                u.iter_mut().for_each(|v| *v *= rho / len);
            }
            let mu = &m * nalgebra::DVector::from_column_slice(&u);
            (u, DirectionKind::Direct, 0, mu.as_slice().to_vec())
        }
        None => {
            let (u, kind, iters) = iterative();
            let mu = reduced_apply(&u);
            (u, kind, iters, mu)
        }
    };
    axpy(-1.0, &rhs, &mut residual);
    let mut s = vec![0.0; n];
    for (&i, &v) in active.iter().zip(&u) {
        s[i] = v;
    }
    Direction {
        s,
        xi: norm(&residual) / zs_norm,
        kind,
        cg_iterations,
    }
}

/// Jacobi-preconditioned CG from `u = 0` on `M u = b`, truncated at the
/// Euclidean `rho`-sphere or on nonpositive curvature.
fn steihaug(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    inv_diag: Option<&[f64]>,
    rho: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize) {
    let precondition = |r: &[f64]| -> Vec<f64> {
        match inv_diag {
            Some(d) => r.iter().zip(d).map(|(a, b)| a * b).collect(),
            None => r.to_vec(),
        }
    };
    let mut u = vec![0.0; b.len()];
    let mut r = b.to_vec();
    if norm(&r) <= tol {
        return (u, 0);
    }
    let mut y = precondition(&r);
    let mut p = y.clone();
    let mut ry = dot(&r, &y);
    for j in 0..max_iter {
        let mp = apply(&p);
        let curv = dot(&p, &mp);
        if curv <= 0.0 {
            return (to_boundary(u, &p, rho), j + 1);
        }
        let step = ry / curv;
        let mut next = u.clone();
        axpy(step, &p, &mut next);
        if norm(&next) >= rho {
            return (to_boundary(u, &p, rho), j + 1);
        }
        u = next;
        axpy(-step, &mp, &mut r);
        if norm(&r) <= tol {
            return (u, j + 1);
        }
        y = precondition(&r);
        let ry_next = dot(&r, &y);
        let beta = ry_next / ry;
        ry = ry_next;
        for (pi, yi) in p.iter_mut().zip(&y) {
            *pi = yi + beta * *pi;
        }
    }
    (u, max_iter)
}

/// `u + t p` with `t ≥ 0` and `‖u + t p‖ = rho`.
fn to_boundary(mut u: Vec<f64>, p: &[f64], rho: f64) -> Vec<f64> {
    let pp = dot(p, p);
    if pp == 0.0 {
        return u;
    }
    let up = dot(&u, p);
    let uu = dot(&u, &u);
    let disc = (up * up - pp * (uu - rho * rho)).max(0.0);
    let t = (disc.sqrt() - up) / pp;
    axpy(t, p, &mut u);
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::t_lambda;
    use crate::linops::DMatrix;
    use crate::penalties::LpPenalty;
    use crate::smooth::LeastSquares;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_gram_is_one_step_exact() {
        let y = vec![2.0, 0.1, -3.0, 0.0];
        let f = LeastSquares::new(DMatrix::identity(4, 4), y).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(1.0, 4, 1.0).unwrap()).unwrap();
        let gp = t_lambda(&prob, &[0.5, 0.5, 0.5, 0.5], 0.1).unwrap();
        let basis = prob.penalty().scd_basis(gp.z(), &gp.z_star_g);
        assert!(!basis.is_empty());
        let d = newton_direction(&prob, &gp, &basis, 1e6, 1e-12, 512);
        assert_eq!(d.kind, DirectionKind::Direct);
        for i in 0..4 {
            let expect = if basis.active().contains(&i) { -gp.z_star[i] / 2.0 } else { 0.0 };
            assert!((d.s[i] - expect).abs() < 1e-14, "{i}: {} vs {expect}", d.s[i]);
        }
        assert!(d.xi < 1e-14);
    }

    #[test]
    fn empty_active_set_gives_zero_step() {
        let f = LeastSquares::new(DMatrix::identity(2, 2), vec![0.1, -0.2]).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(1.0, 2, 1.0).unwrap()).unwrap();
        let gp = t_lambda(&prob, &[0.0, 0.0], 0.25).unwrap();
        assert_eq!(gp.z(), &[0.0, 0.0]);
        let basis = prob.penalty().scd_basis(gp.z(), &gp.z_star_g);
        let d = newton_direction(&prob, &gp, &basis, 1.0, 0.1, 512);
        assert_eq!(d.s, vec![0.0, 0.0]);
        assert_eq!(d.xi, 0.0);
    }

    #[test]
    fn direct_and_cg_agree_on_lasso() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        let (m, n) = (30, 20);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let y: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = LeastSquares::new(a, y).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(1.0, n, 0.5).unwrap()).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gp = t_lambda(&prob, &x, 0.01).unwrap();
        let basis = prob.penalty().scd_basis(gp.z(), &gp.z_star_g);
        assert!(basis.active().len() > 5);
        let direct = newton_direction(&prob, &gp, &basis, 1e6, 1e-12, 512);
        let cg = newton_direction(&prob, &gp, &basis, 1e6, 1e-12, 0);
        assert_eq!(direct.kind, DirectionKind::Direct);
        assert_eq!(cg.kind, DirectionKind::ConjugateGradient);
        let diff = crate::vecops::dist(&direct.s, &cg.s);
        assert!(diff <= 1e-8, "direct vs cg differ by {diff}");
    }

    #[test]
    fn steps_respect_the_radius() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(12, 10, |_, _| rng.random_range(-1.0..1.0));
        let y: Vec<f64> = (0..12).map(|_| rng.random_range(-5.0..5.0)).collect();
        let f = LeastSquares::new(a, y).unwrap();
        let prob = CompositeProblem::new(f, LpPenalty::uniform(0.5, 10, 0.2).unwrap()).unwrap();
        let gp = t_lambda(&prob, &[0.3; 10], 0.02).unwrap();
        let basis = prob.penalty().scd_basis(gp.z(), &gp.z_star_g);
        for cutoff in [0, 512] {
            for rho in [1e-3, 0.1, 1.0] {
                let d = newton_direction(&prob, &gp, &basis, rho, 1e-8, cutoff);
                assert!(d.norm() <= rho * (1.0 + 1e-12));
                for i in 0..10 {
                    if !basis.active().contains(&i) {
                        assert_eq!(d.s[i], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_step_lands_on_sphere() {
        let u = to_boundary(vec![0.3, 0.0], &[1.0, 1.0], 1.0);
        assert!((norm(&u) - 1.0).abs() < 1e-15);
    }
}

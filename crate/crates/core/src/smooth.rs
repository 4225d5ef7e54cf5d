//! Smooth data terms `f` with gradient and Hessian-vector products.

use crate::linops::LinearOperator;
use crate::vecops::{axpy, norm, norm_sq_pairs, Compensated};
use nalgebra::DMatrix;
use std::sync::OnceLock;

/// A twice continuously differentiable function on `R^n`.
pub trait SmoothFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }

    /// `f(x)` carried in double-double where the implementation can.
    fn value_compensated(&self, x: &[f64]) -> Compensated {
        Compensated::new(self.value(x), 0.0)
    }

    fn value_and_gradient_compensated(&self, x: &[f64]) -> (Compensated, Vec<f64>) {
        let (v, g) = self.value_and_gradient(x);
        (Compensated::new(v, 0.0), g)
    }

    /// `∇²f(x) d`.
    fn hessian_apply(&self, x: &[f64], d: &[f64]) -> Vec<f64>;

    /// The principal submatrix of `∇²f(x)` on `active` (sorted).
    fn reduced_hessian(&self, x: &[f64], active: &[usize]) -> DMatrix<f64> {
        let k = active.len();
        let mut m = DMatrix::zeros(k, k);
        let mut e = vec![0.0; self.dim()];
        for (col, &j) in active.iter().enumerate() {
            e[j] = 1.0;
            let h = self.hessian_apply(x, &e);
            e[j] = 0.0;
            for (row, &i) in active.iter().enumerate() {
                m[(row, col)] = h[i];
            }
        }
        m
    }

    /// `(∇²f(x))_{II} u` for sorted `active`.
    fn reduced_hessian_apply(&self, x: &[f64], active: &[usize], u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.dim()];
        for (&i, &v) in active.iter().zip(u) {
            full[i] = v;
        }
        let h = self.hessian_apply(x, &full);
        active.iter().map(|&i| h[i]).collect()
    }

    /// True if `f` is quadratic, so gradients along a line follow from one
    /// Hessian product.
    fn is_quadratic(&self) -> bool {
        false
    }

    /// Upper bound on the rank of `∇²f`, if known.
    fn hessian_rank_bound(&self) -> Option<usize> {
        None
    }

    /// Diagonal of `∇²f(x)`, when cheaply available (used for Jacobi scaling).
    fn hessian_diagonal(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// Power-method estimate of the largest Hessian eigenvalue at `x`.
pub fn hessian_norm_estimate<F: SmoothFunction + ?Sized>(f: &F, x: &[f64], iterations: usize) -> f64 {
    let n = f.dim();
    if n == 0 {
        return 0.0;
    }
    // fixed, non-degenerate start vector
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|t| *t *= s);
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let hv = f.hessian_apply(x, &v);
        let nrm = norm(&hv);
        if nrm == 0.0 {
            return 0.0;
        }
        estimate = nrm;
        v = hv.into_iter().map(|t| t / nrm).collect();
    }
    estimate
}

/// `f(x) = ‖A x − y‖²`.
pub struct LeastSquares<A> {
    a: A,
    y: Vec<f64>,
    column_norms: OnceLock<Vec<f64>>,
}

impl<A: LinearOperator> LeastSquares<A> {
    pub fn new(a: A, y: Vec<f64>) -> crate::Result<Self> {
        crate::error::check_len("least squares data", a.nrows(), y.len())?;
        Ok(LeastSquares {
            a,
            y,
            column_norms: OnceLock::new(),
        })
    }

    pub fn operator(&self) -> &A {
        &self.a
    }

    pub fn data(&self) -> &[f64] {
        &self.y
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.apply(x);
        axpy(-1.0, &self.y, &mut r);
        r
    }
}

impl<A: LinearOperator> SmoothFunction for LeastSquares<A> {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        crate::vecops::norm_sq(&self.residual(x))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let r = self.residual(x);
        let mut g = self.a.apply_transpose(&r);
        g.iter_mut().for_each(|v| *v *= 2.0);
        (crate::vecops::norm_sq(&r), g)
    }

    fn value_compensated(&self, x: &[f64]) -> Compensated {
        match self.a.residual_compensated(x, &self.y) {
            Some((hi, lo)) => norm_sq_pairs(&hi, &lo),
            None => Compensated::new(self.value(x), 0.0),
        }
    }

    fn value_and_gradient_compensated(&self, x: &[f64]) -> (Compensated, Vec<f64>) {
        match self.a.residual_compensated(x, &self.y) {
            Some((hi, lo)) => {
                let mut g = self.a.apply_transpose(&hi);
                g.iter_mut().for_each(|v| *v *= 2.0);
                (norm_sq_pairs(&hi, &lo), g)
            }
            None => {
                let (v, g) = self.value_and_gradient(x);
                (Compensated::new(v, 0.0), g)
            }
        }
    }

    fn hessian_apply(&self, _x: &[f64], d: &[f64]) -> Vec<f64> {
        let ad = self.a.apply(d);
        let mut h = self.a.apply_transpose(&ad);
        h.iter_mut().for_each(|v| *v *= 2.0);
        h
    }

    fn reduced_hessian(&self, _x: &[f64], active: &[usize]) -> DMatrix<f64> {
        self.a.gram_subset(active) * 2.0
    }

    fn reduced_hessian_apply(&self, _x: &[f64], active: &[usize], u: &[f64]) -> Vec<f64> {
        let ad = self.a.apply_subset(active, u);
        let mut h = self.a.apply_transpose_subset(&ad, active);
        h.iter_mut().for_each(|v| *v *= 2.0);
        h
    }

    fn is_quadratic(&self) -> bool {
        true
    }

    fn hessian_rank_bound(&self) -> Option<usize> {
        Some(self.a.nrows())
    }

    fn hessian_diagonal(&self, _x: &[f64]) -> Option<Vec<f64>> {
        let norms = self.column_norms.get_or_init(|| self.a.column_norms_sq());
        Some(norms.iter().map(|v| 2.0 * v).collect())
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::SmoothFunction;
    use rand::{Rng, SeedableRng};

    /// Worst relative defect between the gradient and central differences.
    pub fn gradient_fd_defect<F: SmoothFunction + ?Sized>(f: &F, probes: usize, seed: u64) -> f64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = f.dim();
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let h = 1e-5;
            let xp: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + h * b).collect();
            let xm: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - h * b).collect();
            let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
            let an = crate::vecops::dot(&f.gradient(&x), &d);
            worst = worst.max((fd - an).abs() / an.abs().max(1.0));
        }
        worst
    }

    /// Worst symmetry defect `|⟨Hd,e⟩ − ⟨d,He⟩|` relative to `‖d‖‖e‖‖H‖`-ish scale.
    pub fn hessian_symmetry_defect<F: SmoothFunction + ?Sized>(f: &F, probes: usize, seed: u64) -> f64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = f.dim();
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let e: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = crate::vecops::dot(&f.hessian_apply(&x, &d), &e);
            let b = crate::vecops::dot(&d, &f.hessian_apply(&x, &e));
            worst = worst.max((a - b).abs() / (a.abs().max(b.abs()).max(1.0)));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::DMatrix as Dense;

    fn sample() -> LeastSquares<Dense<f64>> {
        let a = Dense::from_row_slice(3, 2, &[1.0, 2.0, 0.0, -1.0, 3.0, 0.5]);
        LeastSquares::new(a, vec![1.0, 0.0, -2.0]).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        assert!(testing::gradient_fd_defect(&sample(), 50, 1) <= 1e-5);
        assert!(testing::hessian_symmetry_defect(&sample(), 50, 2) <= 1e-10);
    }

    #[test]
    fn reduced_hessian_and_diagonal() {
        let f = sample();
        let full = f.reduced_hessian(&[0.0, 0.0], &[0, 1]);
        let generic = SmoothFunction::reduced_hessian(&GenericOnly(&f), &[0.0, 0.0], &[0, 1]);
        assert!((full - generic).abs().max() < 1e-14);
        assert_eq!(f.hessian_diagonal(&[0.0, 0.0]).unwrap(), vec![20.0, 10.5]);
        for active in [vec![0], vec![1], vec![0, 1]] {
            let u: Vec<f64> = active.iter().map(|&i| 1.5 - i as f64).collect();
            let fast = f.reduced_hessian_apply(&[0.0, 0.0], &active, &u);
            let slow = GenericOnly(&f).reduced_hessian_apply(&[0.0, 0.0], &active, &u);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn power_method_finds_top_eigenvalue() {
        let f = sample();
        let h = f.reduced_hessian(&[0.0, 0.0], &[0, 1]);
        let top = h.symmetric_eigenvalues().max();
        assert!((hessian_norm_estimate(&f, &[0.0, 0.0], 100) - top).abs() < 1e-8 * top);
    }

    struct GenericOnly<'a, F>(&'a F);
    impl<F: SmoothFunction> SmoothFunction for GenericOnly<'_, F> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn value(&self, x: &[f64]) -> f64 {
            self.0.value(x)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            self.0.gradient(x)
        }
        fn hessian_apply(&self, x: &[f64], d: &[f64]) -> Vec<f64> {
            self.0.hessian_apply(x, d)
        }
    }
}

use super::DifferenceOperator;
use crate::envelope::CompositeProblem;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::penalties::{LpPenalty, Penalty, ScdBasis};
use crate::smooth::SmoothFunction;
use crate::vecops::{dot, norm_sq};

/// `f(x, v) = ‖Ax − y‖² + ⟨v*, Bx − v⟩ + σ/2 ‖Bx − v‖²` on the stacked vector `(x, v)`.
pub struct TvInnerSmooth<'a, A: ?Sized> {
    a: &'a A,
    y: &'a [f64],
    b: &'a DifferenceOperator,
    multiplier: Vec<f64>,
    sigma: f64,
    a_column_norms: Option<&'a [f64]>,
}

/// `g(x, v) = α ‖v‖₁`; the image block is left untouched.
pub struct TvInnerPenalty {
    n: usize,
    v_part: LpPenalty,
}

pub type TvInnerProblem<'a, A> = CompositeProblem<TvInnerSmooth<'a, A>, TvInnerPenalty>;

/// Assembles the augmented-Lagrangian subproblem for fixed multiplier and `σ`.
pub fn build_inner_problem<'a, A: LinearOperator + ?Sized>(
    a: &'a A,
    y: &'a [f64],
    alpha: f64,
    b: &'a DifferenceOperator,
    multiplier: Vec<f64>,
    sigma: f64,
) -> Result<TvInnerProblem<'a, A>> {
    assemble(a, y, alpha, b, multiplier, sigma, None)
}

/// As [`build_inner_problem`], with `‖a_j‖²` supplied for Jacobi scaling.
pub(crate) fn assemble<'a, A: LinearOperator + ?Sized>(
    a: &'a A,
    y: &'a [f64],
    alpha: f64,
    b: &'a DifferenceOperator,
    multiplier: Vec<f64>,
    sigma: f64,
    a_column_norms: Option<&'a [f64]>,
) -> Result<TvInnerProblem<'a, A>> {
    check_len("tv data", a.nrows(), y.len())?;
    check_len("tv image size", a.ncols(), b.ncols())?;
    check_len("tv multiplier", b.nrows(), multiplier.len())?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("penalty parameter must be positive, got {sigma}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("TV weight must be positive, got {alpha}")));
    }
    let smooth = TvInnerSmooth {
        a,
        y,
        b,
        multiplier,
        sigma,
        a_column_norms,
    };
    let penalty = TvInnerPenalty {
        n: a.ncols(),
        v_part: LpPenalty::uniform(1.0, b.nrows(), alpha)?,
    };
    CompositeProblem::new(smooth, penalty)
}

impl<'a, A: LinearOperator + ?Sized> TvInnerSmooth<'a, A> {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    fn split<'w>(&self, w: &'w [f64]) -> (&'w [f64], &'w [f64]) {
        w.split_at(self.a.ncols())
    }

    /// `Bx − v`.
    fn constraint(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut r = self.b.apply(x);
        r.iter_mut().zip(v).for_each(|(ri, vi)| *ri -= vi);
        r
    }
}

impl<A: LinearOperator + ?Sized> SmoothFunction for TvInnerSmooth<'_, A> {
    fn dim(&self) -> usize {
        self.a.ncols() + self.b.nrows()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let (x, v) = self.split(w);
        let mut res = self.a.apply(x);
        res.iter_mut().zip(self.y).for_each(|(r, yi)| *r -= yi);
        let c = self.constraint(x, v);
        norm_sq(&res) + dot(&self.multiplier, &c) + 0.5 * self.sigma * norm_sq(&c)
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.value_and_gradient(w).1
    }

    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let (x, v) = self.split(w);
        let mut res = self.a.apply(x);
        res.iter_mut().zip(self.y).for_each(|(r, yi)| *r -= yi);
        let c = self.constraint(x, v);
        let value = norm_sq(&res) + dot(&self.multiplier, &c) + 0.5 * self.sigma * norm_sq(&c);
        let m: Vec<f64> = self.multiplier.iter().zip(&c).map(|(l, ci)| l + self.sigma * ci).collect();
        let mut grad = self.a.apply_transpose(&res);
        grad.iter_mut().for_each(|g| *g *= 2.0);
        for (g, bt) in grad.iter_mut().zip(self.b.apply_transpose(&m)) {
            *g += bt;
        }
        grad.extend(m.iter().map(|mi| -mi));
        (value, grad)
    }

    fn hessian_apply(&self, _w: &[f64], d: &[f64]) -> Vec<f64> {
        let (dx, dv) = self.split(d);
        let ad = self.a.apply(dx);
        let mut out = self.a.apply_transpose(&ad);
        out.iter_mut().for_each(|o| *o *= 2.0);
        let c: Vec<f64> = self.constraint(dx, dv).into_iter().map(|ci| self.sigma * ci).collect();
        for (o, bt) in out.iter_mut().zip(self.b.apply_transpose(&c)) {
            *o += bt;
        }
        out.extend(c.iter().map(|ci| -ci));
        out
    }

    fn is_quadratic(&self) -> bool {
        true
    }

    fn hessian_diagonal(&self, _w: &[f64]) -> Option<Vec<f64>> {
        let norms = self.a_column_norms?;
        let mut d: Vec<f64> = norms
            .iter()
            .zip(self.b.gram_diagonal())
            .map(|(a, b)| 2.0 * a + self.sigma * b)
            .collect();
        d.extend(std::iter::repeat_n(self.sigma, self.b.nrows()));
        Some(d)
    }
}

impl TvInnerPenalty {
    pub fn alpha(&self) -> f64 {
        self.v_part.alpha()
    }
}

impl Penalty for TvInnerPenalty {
    fn dim(&self) -> usize {
        self.n + self.v_part.dim()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.v_part.eval(&w[self.n..])
    }

    fn prox(&self, lambda: f64, w: &[f64]) -> Result<Vec<f64>> {
        check_len("tv inner prox", self.dim(), w.len())?;
        let mut out = w[..self.n].to_vec();
        out.extend(self.v_part.prox_vec(lambda, &w[self.n..])?);
        Ok(out)
    }

    fn scd_basis(&self, w: &[f64], subgradient: &[f64]) -> ScdBasis {
        let image = ScdBasis::new(self.n, (0..self.n).collect(), vec![0.0; self.n]);
        image.concat(&self.v_part.scd_basis(&w[self.n..], &subgradient[self.n..]))
    }

    fn is_convex(&self) -> bool {
        true
    }
}

//! Forward-backward steps `T_λ`, the forward-backward envelope and graph
//! points of the subdifferential for a composite problem `φ = f + g`.

use crate::error::{check_len, Result};
use crate::penalties::Penalty;
use crate::smooth::SmoothFunction;
use crate::vecops::{dot, dot_compensated, norm, norm_sq, sub, Compensated};

/// `φ(x) = f(x) + g(x)` with `f` smooth and `g` nonsmooth.
pub struct CompositeProblem<F, G> {
    smooth: F,
    penalty: G,
}

impl<F: SmoothFunction, G: Penalty> CompositeProblem<F, G> {
    pub fn new(smooth: F, penalty: G) -> Result<Self> {
        check_len("composite problem penalty", smooth.dim(), penalty.dim())?;
        Ok(CompositeProblem { smooth, penalty })
    }

    pub fn smooth(&self) -> &F {
        &self.smooth
    }

    pub fn penalty(&self) -> &G {
        &self.penalty
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.smooth.value(x) + self.penalty.value(x)
    }
}

/// The smooth part evaluated at a base point `x`.
#[derive(Debug, Clone)]
pub struct Anchor {
    pub x: Vec<f64>,
    pub fx: f64,
    /// Low-order part of `f(x)`.
    pub fx_lo: f64,
    pub grad: Vec<f64>,
}

impl Anchor {
    pub fn new<F: SmoothFunction, G: Penalty>(prob: &CompositeProblem<F, G>, x: Vec<f64>) -> Result<Self> {
        check_len("anchor point", prob.dim(), x.len())?;
        let (fx, grad) = prob.smooth.value_and_gradient_compensated(&x);
        Ok(Anchor::from_parts(x, fx, grad))
    }

    /// Like [`Anchor::new`] with `f(x)` in plain floating point.
    pub fn plain<F: SmoothFunction, G: Penalty>(prob: &CompositeProblem<F, G>, x: Vec<f64>) -> Result<Self> {
        check_len("anchor point", prob.dim(), x.len())?;
        let (fx, grad) = prob.smooth.value_and_gradient(&x);
        Ok(Anchor { x, fx, fx_lo: 0.0, grad })
    }

    pub fn from_parts(x: Vec<f64>, fx: Compensated, grad: Vec<f64>) -> Self {
        Anchor { x, fx: fx.hi, fx_lo: fx.lo, grad }
    }
}

/// One forward-backward step from an [`Anchor`] with step size `lambda`.
#[derive(Debug, Clone)]
pub struct ProxStep {
    pub lambda: f64,
    pub z: Vec<f64>,
    pub fz: f64,
    pub gz: f64,
    /// `‖z − x‖² / (2λ)`.
    pub eta: f64,
    /// `f(x) + ⟨∇f(x), z − x⟩`.
    pub linearization: f64,
    /// `ψ_λ(x, z)`, the envelope value.
    pub envelope: f64,
}

impl ProxStep {
    pub fn phi(&self) -> f64 {
        self.fz + self.gz
    }

    /// `f(z) − ℓ_f(x, z)`.
    pub fn model_gap(&self) -> f64 {
        self.fz - self.linearization
    }

    /// `f(z) ≤ ℓ_f(x, z) + α η`.
    pub fn descent_holds(&self, alpha: f64) -> bool {
        self.fz <= self.linearization + alpha * self.eta
    }
}

pub fn prox_step<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    anchor: &Anchor,
    lambda: f64,
) -> Result<ProxStep> {
    let forward: Vec<f64> = anchor
        .x
        .iter()
        .zip(&anchor.grad)
        .map(|(x, g)| x - lambda * g)
        .collect();
    let z = prob.penalty.prox(lambda, &forward)?;
    let d = sub(&z, &anchor.x);
    let eta = norm_sq(&d) / (2.0 * lambda);
    let slope = dot_compensated(&anchor.grad, &d);
    let gz = prob.penalty.value_compensated(&z);
    let fz = prob.smooth.value(&z);
    let mut envelope = Compensated::new(anchor.fx, anchor.fx_lo);
    envelope.add_pair(slope);
    envelope.add(eta);
    envelope.add_pair(gz);
    Ok(ProxStep {
        lambda,
        z,
        fz,
        gz: gz.value(),
        eta,
        linearization: anchor.fx + slope.value(),
        envelope: envelope.value(),
    })
}

/// A forward-backward step together with the subgradients it certifies.
#[derive(Debug, Clone)]
pub struct GraphPoint {
    pub anchor: Anchor,
    pub step: ProxStep,
    pub grad_z: Vec<f64>,
    /// `−∇f(x) − (z − x)/λ ∈ ∂g(z)`.
    pub z_star_g: Vec<f64>,
    /// `∇f(z) + z*_g ∈ ∂φ(z)`.
    pub z_star: Vec<f64>,
}

impl GraphPoint {
    pub fn complete<F: SmoothFunction, G: Penalty>(
        prob: &CompositeProblem<F, G>,
        anchor: Anchor,
        step: ProxStep,
    ) -> Self {
        let grad_z = prob.smooth.gradient(&step.z);
        let inv = 1.0 / step.lambda;
        let z_star_g: Vec<f64> = anchor
            .grad
            .iter()
            .zip(step.z.iter().zip(&anchor.x))
            .map(|(g, (z, x))| -g - (z - x) * inv)
            .collect();
        let z_star = grad_z.iter().zip(&z_star_g).map(|(a, b)| a + b).collect();
        GraphPoint {
            anchor,
            step,
            grad_z,
            z_star_g,
            z_star,
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.anchor.x
    }

    pub fn z(&self) -> &[f64] {
        &self.step.z
    }

    pub fn lambda(&self) -> f64 {
        self.step.lambda
    }

    pub fn eta(&self) -> f64 {
        self.step.eta
    }

    pub fn envelope(&self) -> f64 {
        self.step.envelope
    }

    pub fn phi(&self) -> f64 {
        self.step.phi()
    }

    /// `‖z*‖`.
    pub fn residual(&self) -> f64 {
        norm(&self.z_star)
    }
}

/// Evaluates `z ∈ T_λ(x)` and the associated graph point.
pub fn t_lambda<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x: &[f64],
    lambda: f64,
) -> Result<GraphPoint> {
    let anchor = Anchor::new(prob, x.to_vec())?;
    let step = prox_step(prob, &anchor, lambda)?;
    Ok(GraphPoint::complete(prob, anchor, step))
}

/// `φ_λ^FB(x)`, evaluated at the point returned by the prox.
pub fn fb_envelope<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x: &[f64],
    lambda: f64,
) -> Result<f64> {
    let anchor = Anchor::new(prob, x.to_vec())?;
    Ok(prox_step(prob, &anchor, lambda)?.envelope)
}

/// `f(z) ≤ ℓ_f(x, z) + α ‖z − x‖²/(2λ)`.
pub fn descent_check<F: SmoothFunction, G: Penalty>(
    prob: &CompositeProblem<F, G>,
    x: &[f64],
    z: &[f64],
    lambda: f64,
    alpha: f64,
) -> bool {
    let (fx, grad) = prob.smooth.value_and_gradient(x);
    let d = sub(z, x);
    prob.smooth.value(z) <= fx + dot(&grad, &d) + alpha * norm_sq(&d) / (2.0 * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::DMatrix;
    use crate::penalties::LpPenalty;
    use crate::smooth::{hessian_norm_estimate, LeastSquares};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn scalar_quadratic() -> CompositeProblem<LeastSquares<DMatrix<f64>>, LpPenalty> {
        let f = LeastSquares::new(DMatrix::from_element(1, 1, 1.0), vec![1.0]).unwrap();
        CompositeProblem::new(f, LpPenalty::uniform(1.0, 1, 0.0).unwrap()).unwrap()
    }

    fn lasso_2d() -> CompositeProblem<LeastSquares<DMatrix<f64>>, LpPenalty> {
        let f = LeastSquares::new(DMatrix::identity(2, 2), vec![2.0, 0.1]).unwrap();
        CompositeProblem::new(f, LpPenalty::uniform(1.0, 2, 1.0).unwrap()).unwrap()
    }

    fn random_instance(
        seed: u64,
        m: usize,
        n: usize,
        p: f64,
    ) -> CompositeProblem<LeastSquares<DMatrix<f64>>, LpPenalty> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let y = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let w = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
        CompositeProblem::new(
            LeastSquares::new(a, y).unwrap(),
            LpPenalty::new(p, w, 0.3).unwrap(),
        )
        .unwrap()
    }

    struct Linear(Vec<f64>);
    impl SmoothFunction for Linear {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            dot(&self.0, x)
        }
        fn gradient(&self, _x: &[f64]) -> Vec<f64> {
            self.0.clone()
        }
        fn hessian_apply(&self, _x: &[f64], d: &[f64]) -> Vec<f64> {
            vec![0.0; d.len()]
        }
    }

    #[test]
    fn pure_gradient_step() {
        let prob = scalar_quadratic();
        let gp = t_lambda(&prob, &[3.0], 0.25).unwrap();
        assert_eq!(gp.z(), &[2.0]);
        assert_eq!(fb_envelope(&prob, &[3.0], 0.25).unwrap(), 2.0);
    }

    #[test]
    fn lasso_prox_step() {
        let prob = lasso_2d();
        let gp = t_lambda(&prob, &[0.0, 0.0], 0.25).unwrap();
        assert!((gp.z()[0] - 0.75).abs() < 1e-15);
        assert_eq!(gp.z()[1], 0.0);
        for i in 0..2 {
            let expect = -gp.anchor.grad[i] - (gp.z()[i] - gp.x()[i]) / 0.25;
            assert_eq!(gp.z_star_g[i], expect);
            assert_eq!(gp.z_star[i], gp.grad_z[i] + gp.z_star_g[i]);
        }
    }

    #[test]
    fn fixed_point_has_zero_eta_and_matching_envelope() {
        let prob = lasso_2d();
        let gp = t_lambda(&prob, &[1.5, 0.0], 0.25).unwrap();
        assert!(gp.eta() < 1e-28);
        assert!(gp.residual() < 1e-12);
        assert!((gp.envelope() - prob.objective(&[1.5, 0.0])).abs() < 1e-12);
    }

    #[test]
    fn descent_check_cases() {
        let lin = CompositeProblem::new(Linear(vec![1.0, -2.0]), LpPenalty::uniform(1.0, 2, 1.0).unwrap()).unwrap();
        assert!(descent_check(&lin, &[0.3, 0.1], &[5.0, -4.0], 10.0, 1e-3));

        let prob = random_instance(11, 8, 5, 1.0);
        let big_l = hessian_norm_estimate(prob.smooth(), &[0.0; 5], 200);
        let gp = t_lambda(&prob, &[0.2, -0.1, 0.4, 0.0, 1.0], 1.0 / big_l).unwrap();
        assert!(descent_check(&prob, gp.x(), gp.z(), 1.0 / big_l, 1.0));

        // step far beyond 1/L on a fixed direction of high curvature
        let x = [0.0; 5];
        let z = [1.0, 1.0, 1.0, 1.0, 1.0];
        let gram = prob.smooth().reduced_hessian(&x, &[0, 1, 2, 3, 4]);
        let curv = (0..5).map(|i| (0..5).map(|j| gram[(i, j)]).sum::<f64>()).sum::<f64>();
        assert!(curv > 0.0);
        let lambda = 10.0 * 5.0 / curv;
        assert!(!descent_check(&prob, &x, &z, lambda, 0.95));
        assert!(descent_check(&prob, &x, &z, 0.5 * 5.0 / curv, 0.95));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn envelope_bounds_objective(seed in 0u64..10_000, p in prop_oneof![Just(0.0), Just(0.5), Just(2.0 / 3.0), Just(1.0), 0.05f64..0.95]) {
            let prob = random_instance(seed, 6, 4, p);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let lambda = rng.random_range(0.01..0.5);
            let env = fb_envelope(&prob, &x, lambda).unwrap();
            prop_assert!(env <= prob.objective(&x) + 1e-12 * (1.0 + prob.objective(&x).abs()));
        }

        #[test]
        fn envelope_is_monotone_in_step(seed in 0u64..10_000, p in prop_oneof![Just(0.5), Just(1.0), 0.05f64..0.95]) {
            let prob = random_instance(seed, 6, 4, p);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x123);
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let l1 = rng.random_range(0.01..0.2);
            let l2 = l1 * rng.random_range(1.1..3.0);
            let e1 = fb_envelope(&prob, &x, l1).unwrap();
            let e2 = fb_envelope(&prob, &x, l2).unwrap();
            prop_assert!(e2 <= e1 + 1e-12 * (1.0 + e1.abs()));
        }

        #[test]
        fn sufficient_decrease_under_descent(seed in 0u64..10_000, frac in 0.05f64..0.95) {
            let prob = random_instance(seed, 7, 5, 1.0);
            let big_l = hessian_norm_estimate(prob.smooth(), &[0.0; 5], 300);
            let lambda = frac / big_l;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x77);
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
            let gp = t_lambda(&prob, &x, lambda).unwrap();
            let alpha = lambda * big_l;
            if gp.step.descent_holds(alpha) {
                let bound = gp.envelope() - (1.0 - alpha) * gp.eta();
                prop_assert!(gp.phi() <= bound + 1e-12 * (1.0 + bound.abs()));
            }
        }
    }

    #[test]
    fn least_squares_gradient_consistency() {
        let prob = random_instance(5, 9, 6, 1.0);
        assert!(crate::smooth::testing::gradient_fd_defect(prob.smooth(), 40, 3) <= 1e-5);
        assert!(crate::smooth::testing::hessian_symmetry_defect(prob.smooth(), 40, 4) <= 1e-10);
    }
}

//! Seeded synthetic problem instances.

use crate::error::Result;
use crate::linops::{CsrMatrix, DMatrix, LinearOperator};
use crate::tomo::{add_noise, build_radon};
use crate::vecops::{norm, norm_inf};
use rand::{seq::index::sample, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A compressed-sensing instance `y = A x_true + noise`.
#[derive(Debug, Clone)]
pub struct SparseRecovery {
    pub a: DMatrix<f64>,
    pub y: Vec<f64>,
    pub x_true: Vec<f64>,
    /// `‖2 Aᵀ y‖_∞`, the smallest ℓ1 weight for which `0` is optimal.
    pub alpha_max: f64,
}

/// Gaussian `m × n` matrix scaled by `1/√m`, `k`-sparse signal with entries
/// of magnitude in `[1, 2]`, and noise of relative size `noise`.
pub fn sparse_recovery(m: usize, n: usize, k: usize, noise: f64, seed: u64) -> SparseRecovery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(m, n, |_, _| s * rng.sample::<f64, _>(StandardNormal));
    let mut x_true = vec![0.0; n];
    for i in sample(&mut rng, n, k.min(n)) {
        let mag = rng.random_range(1.0..2.0);
        x_true[i] = if rng.random_bool(0.5) { mag } else { -mag };
    }
    let clean = &a * nalgebra::DVector::from_column_slice(&x_true);
    let mut y: Vec<f64> = clean.iter().copied().collect();
    if noise > 0.0 {
        let e: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let f = noise * norm(&y) / norm(&e);
        y.iter_mut().zip(&e).for_each(|(v, ei)| *v += f * ei);
    }
    let aty = a.tr_mul(&nalgebra::DVector::from_column_slice(&y));
    let alpha_max = 2.0 * norm_inf(aty.as_slice());
    SparseRecovery { a, y, x_true, alpha_max }
}

/// A tomographic instance: sparse point sources on an `n × n` grid seen
/// through a parallel-beam Radon matrix.
#[derive(Debug, Clone)]
pub struct SparseTomography {
    pub a: CsrMatrix,
    pub y: Vec<f64>,
    pub x_true: Vec<f64>,
    pub alpha_max: f64,
}

/// `angles` projection angles with `⌈√2 n⌉` detector bins, `k` nonnegative
/// spikes with values in `[1, 2]`, and noise of relative size `noise`.
pub fn sparse_tomography(n: usize, angles: usize, k: usize, noise: f64, seed: u64) -> Result<SparseTomography> {
    let bins = (n as f64 * std::f64::consts::SQRT_2).ceil() as usize;
    let a = build_radon(n, n, angles, bins)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x_true = vec![0.0; n * n];
    for i in sample(&mut rng, n * n, k.min(n * n)) {
        x_true[i] = rng.random_range(1.0..2.0);
    }
    let y = add_noise(&a.apply(&x_true), noise, seed.wrapping_add(1));
    let alpha_max = 2.0 * norm_inf(&a.apply_transpose(&y));
    Ok(SparseTomography { a, y, x_true, alpha_max })
}

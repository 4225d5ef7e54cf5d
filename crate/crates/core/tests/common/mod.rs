//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// `½(z − v)² + c|z|^p` with `0^0 = 0`.
pub fn prox_objective(p: f64, c: f64, v: f64, z: f64) -> f64 {
    let pen = if z == 0.0 {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        z.abs().powf(p)
    };
    0.5 * (z - v) * (z - v) + c * pen
}

/// Best objective over a uniform grid on `[min(0,v), max(0,v)]`, refined by
/// golden-section search around the best grid cell, and the endpoints.
pub fn grid_prox_oracle(p: f64, c: f64, v: f64, points: usize) -> f64 {
    let (lo, hi) = if v < 0.0 { (v, 0.0) } else { (0.0, v) };
    let h = |z: f64| prox_objective(p, c, v, z);
    let mut best = h(0.0).min(h(v));
    if hi == lo {
        return best;
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best_k = 0;
    let mut best_grid = f64::INFINITY;
    for k in 0..points {
        let val = h(lo + step * k as f64);
        if val < best_grid {
            best_grid = val;
            best_k = k;
        }
    }
    best = best.min(best_grid);
    let (mut a, mut b) = (
        (lo + step * (best_k as f64 - 1.0)).max(lo),
        (lo + step * (best_k as f64 + 1.0)).min(hi),
    );
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if h(x1) < h(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    best.min(h(0.5 * (a + b)))
}

pub fn soft(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

/// Proximal gradient on `‖Ax − y‖² + α Σ wᵢ|xᵢ|` with step `1/L`, `L` the
/// exact top eigenvalue of `2AᵀA`; stops early once iterates stop moving.
pub fn ista_l1(a: &DMatrix<f64>, y: &[f64], alpha: f64, weights: &[f64], max_iter: usize) -> Vec<f64> {
    let gram = a.transpose() * a * 2.0;
    let l = gram.clone().symmetric_eigenvalues().max();
    let step = 1.0 / l;
    let aty = a.transpose() * DVector::from_column_slice(y) * 2.0;
    let mut x = DVector::zeros(a.ncols());
    for _ in 0..max_iter {
        let g = &gram * &x - &aty;
        let next = DVector::from_iterator(
            x.len(),
            (0..x.len()).map(|i| soft(x[i] - step * g[i], step * alpha * weights[i])),
        );
        let moved = (&next - &x).norm();
        x = next;
        if moved <= 1e-16 * x.norm().max(1.0) {
            break;
        }
    }
    x.as_slice().to_vec()
}

/// Anisotropic TV with forward differences over interior pixels.
pub fn tv(x: &[f64], n1: usize, n2: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n2 - 1 {
        for j in 0..n1 - 1 {
            s += (x[i * n1 + j + 1] - x[i * n1 + j]).abs() + (x[(i + 1) * n1 + j] - x[i * n1 + j]).abs();
        }
    }
    s
}

/// Best objective of subgradient descent on `‖x − y‖² + α TV(x)` with
/// diminishing steps, started at `y`.
pub fn tv_denoise_subgradient(y: &[f64], alpha: f64, n1: usize, n2: usize, iters: usize) -> f64 {
    let obj = |x: &[f64]| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() + alpha * tv(x, n1, n2);
    let mut x = y.to_vec();
    let mut best = obj(&x);
    let mut g = vec![0.0; x.len()];
    for k in 0..iters {
        for (gi, (xi, yi)) in g.iter_mut().zip(x.iter().zip(y)) {
            *gi = 2.0 * (xi - yi);
        }
        for i in 0..n2 - 1 {
            for j in 0..n1 - 1 {
                let here = i * n1 + j;
                for there in [here + 1, here + n1] {
                    let s = alpha * (x[there] - x[here]).signum();
                    g[there] += s;
                    g[here] -= s;
                }
            }
        }
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn == 0.0 {
            break;
        }
        let t = 0.05 / ((k + 1) as f64).sqrt() / gn;
        x.iter_mut().zip(&g).for_each(|(xi, gi)| *xi -= t * gi);
        best = best.min(obj(&x));
    }
    best
}

pub fn support(v: &[f64]) -> Vec<usize> {
    (0..v.len()).filter(|&i| v[i] != 0.0).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn smallest_singular(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

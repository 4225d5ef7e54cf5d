//! Orthonormal Haar (Daubechies-1) multilevel transform.
//!
//! Coefficient layout per level: approximations in the leading half, details in
//! the trailing half; deeper levels recurse on the approximation block.

use crate::error::{Error, Result};
use crate::linops::LinearOperator;
use std::f64::consts::FRAC_1_SQRT_2;

fn check_len(len: usize, levels: usize) -> Result<()> {
    let block = 1usize.checked_shl(levels as u32).unwrap_or(0);
    if block == 0 || !len.is_multiple_of(block) || len == 0 {
        return Err(Error::invalid(format!(
            "length {len} is not a positive multiple of 2^{levels}"
        )));
    }
    Ok(())
}

fn forward_step(x: &mut [f64], scratch: &mut Vec<f64>) {
    let half = x.len() / 2;
    scratch.clear();
    scratch.extend_from_slice(x);
    for k in 0..half {
        let (a, b) = (scratch[2 * k], scratch[2 * k + 1]);
        x[k] = (a + b) * FRAC_1_SQRT_2;
        x[half + k] = (a - b) * FRAC_1_SQRT_2;
    }
}

fn inverse_step(x: &mut [f64], scratch: &mut Vec<f64>) {
    let half = x.len() / 2;
    scratch.clear();
    scratch.extend_from_slice(x);
    for k in 0..half {
        let (a, d) = (scratch[k], scratch[half + k]);
        x[2 * k] = (a + d) * FRAC_1_SQRT_2;
        x[2 * k + 1] = (a - d) * FRAC_1_SQRT_2;
    }
}

/// 1-D analysis with `levels` levels.
pub fn wavelet_transform(x: &[f64], levels: usize) -> Result<Vec<f64>> {
    check_len(x.len(), levels)?;
    let mut out = x.to_vec();
    let mut scratch = Vec::with_capacity(x.len());
    let mut len = x.len();
    for _ in 0..levels {
        forward_step(&mut out[..len], &mut scratch);
        len /= 2;
    }
    Ok(out)
}

/// 1-D synthesis, the inverse (and adjoint) of [`wavelet_transform`].
pub fn wavelet_inverse(c: &[f64], levels: usize) -> Result<Vec<f64>> {
    check_len(c.len(), levels)?;
    let mut out = c.to_vec();
    let mut scratch = Vec::with_capacity(c.len());
    for l in (0..levels).rev() {
        let len = c.len() >> l;
        inverse_step(&mut out[..len], &mut scratch);
    }
    Ok(out)
}

// One level on the leading `rows x cols` block of a row-major image of width `n1`:
// rows first, then columns.
fn forward_2d_level(img: &mut [f64], n1: usize, rows: usize, cols: usize, scratch: &mut Vec<f64>) {
    for r in 0..rows {
        forward_step(&mut img[r * n1..r * n1 + cols], scratch);
    }
    let mut col = vec![0.0; rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = img[r * n1 + c];
        }
        forward_step(&mut col, scratch);
        for r in 0..rows {
            img[r * n1 + c] = col[r];
        }
    }
}

fn inverse_2d_level(img: &mut [f64], n1: usize, rows: usize, cols: usize, scratch: &mut Vec<f64>) {
    let mut col = vec![0.0; rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = img[r * n1 + c];
        }
        inverse_step(&mut col, scratch);
        for r in 0..rows {
            img[r * n1 + c] = col[r];
        }
    }
    for r in 0..rows {
        inverse_step(&mut img[r * n1..r * n1 + cols], scratch);
    }
}

/// 2-D analysis of a row-major `n1`-column, `n2`-row image.
pub fn wavelet_transform_2d(values: &[f64], n1: usize, n2: usize, levels: usize) -> Result<Vec<f64>> {
    crate::error::check_len("wavelet image", n1 * n2, values.len())?;
    check_len(n1, levels)?;
    check_len(n2, levels)?;
    let mut out = values.to_vec();
    let mut scratch = Vec::new();
    for l in 0..levels {
        forward_2d_level(&mut out, n1, n2 >> l, n1 >> l, &mut scratch);
    }
    Ok(out)
}

/// 2-D synthesis, the inverse of [`wavelet_transform_2d`].
pub fn wavelet_inverse_2d(coeffs: &[f64], n1: usize, n2: usize, levels: usize) -> Result<Vec<f64>> {
    crate::error::check_len("wavelet image", n1 * n2, coeffs.len())?;
    check_len(n1, levels)?;
    check_len(n2, levels)?;
    let mut out = coeffs.to_vec();
    let mut scratch = Vec::new();
    for l in (0..levels).rev() {
        inverse_2d_level(&mut out, n1, n2 >> l, n1 >> l, &mut scratch);
    }
    Ok(out)
}

/// The synthesis map `Φ: coefficients ↦ image` as an operator; its adjoint is the analysis.
#[derive(Debug, Clone, Copy)]
pub struct WaveletSynthesis {
    n1: usize,
    n2: usize,
    levels: usize,
}

impl WaveletSynthesis {
    pub fn new(n1: usize, n2: usize, levels: usize) -> Result<Self> {
        check_len(n1, levels)?;
        check_len(n2, levels)?;
        Ok(WaveletSynthesis { n1, n2, levels })
    }
}

impl LinearOperator for WaveletSynthesis {
    fn nrows(&self) -> usize {
        self.n1 * self.n2
    }
    fn ncols(&self) -> usize {
        self.n1 * self.n2
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let v = wavelet_inverse_2d(x, self.n1, self.n2, self.levels).expect("validated at construction");
        out.copy_from_slice(&v);
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        let v = wavelet_transform_2d(y, self.n1, self.n2, self.levels).expect("validated at construction");
        out.copy_from_slice(&v);
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        vec![1.0; self.n1 * self.n2]
    }
}

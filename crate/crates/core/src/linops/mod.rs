//! Linear operators: dense and CSR matrices, composition, transposition and
//! column selection, all behind [`LinearOperator`].
//!
//! Every operator is immutable after construction. Products are computed with a
//! fixed reduction order, so repeated calls return bitwise-identical results even
//! when rows are processed in parallel.

mod compose;
mod csr;
mod dense;
pub mod mtx;

pub use compose::{ColumnSubset, Composed, Identity, Scaled, Transposed};
pub use csr::CsrMatrix;
pub use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};

/// A real linear map `R^cols -> R^rows` with its adjoint.
pub trait LinearOperator: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `out = A x`. Lengths are the caller's responsibility.
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// `out = A^T y`. Lengths are the caller's responsibility.
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]);

    fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nrows()];
        self.apply_into(x, &mut out);
        out
    }

    fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols()];
        self.apply_transpose_into(y, &mut out);
        out
    }

    /// Column `j` as a dense vector.
    fn column(&self, j: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.ncols()];
        e[j] = 1.0;
        self.apply(&e)
    }

    /// Squared Euclidean norms of all columns.
    fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.ncols())
            .map(|j| self.column(j).iter().map(|v| v * v).sum())
            .collect()
    }

    /// `A_Cᵀ A_C` for the sorted column subset `C`.
    fn gram_subset(&self, cols: &[usize]) -> DMatrix<f64> {
        let mut sub = DMatrix::zeros(self.nrows(), cols.len());
        for (k, &j) in cols.iter().enumerate() {
            sub.set_column(k, &nalgebra::DVector::from_vec(self.column(j)));
        }
        sub.tr_mul(&sub)
    }

    /// `A_C u` for the sorted column subset `C`.
    fn apply_subset(&self, cols: &[usize], u: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.ncols()];
        for (&j, &v) in cols.iter().zip(u) {
            full[j] = v;
        }
        self.apply(&full)
    }

    /// Entries `cols` of `A^T y`.
    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        let full = self.apply_transpose(y);
        cols.iter().map(|&j| full[j]).collect()
    }

    /// `A x − y` in double-double as `(hi, lo)`, when the operator supports it.
    fn residual_compensated(&self, _x: &[f64], _y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }
}

/// Checked matrix-vector product.
pub fn matvec(a: &dyn LinearOperator, x: &[f64]) -> Result<Vec<f64>> {
    check_len("matvec", a.ncols(), x.len())?;
    Ok(a.apply(x))
}

/// Checked transposed product.
pub fn matvec_transpose(a: &dyn LinearOperator, y: &[f64]) -> Result<Vec<f64>> {
    check_len("matvec_transpose", a.nrows(), y.len())?;
    Ok(a.apply_transpose(y))
}

/// Restricts `a` to the columns listed in `index` (sorted, duplicate-free).
pub fn submatrix_columns<'a, A: LinearOperator + ?Sized>(
    a: &'a A,
    index: &[usize],
) -> Result<ColumnSubset<'a, A>> {
    ColumnSubset::new(a, index.to_vec())
}

/// Materializes any operator as a dense matrix by applying it to unit vectors.
pub fn to_dense(a: &dyn LinearOperator) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for j in 0..a.ncols() {
        m.set_column(j, &nalgebra::DVector::from_vec(a.column(j)));
    }
    m
}

pub(crate) fn validate_index_set(index: &[usize], n: usize) -> Result<()> {
    for w in index.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid(format!(
                "index set must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&last) = index.last() {
        if last >= n {
            return Err(Error::invalid(format!(
                "column index {last} out of range for {n} columns"
            )));
        }
    }
    Ok(())
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply_into(x, out)
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).apply_transpose_into(y, out)
    }
    fn column(&self, j: usize) -> Vec<f64> {
        (**self).column(j)
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        (**self).column_norms_sq()
    }
    fn apply_subset(&self, cols: &[usize], u: &[f64]) -> Vec<f64> {
        (**self).apply_subset(cols, u)
    }
    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        (**self).apply_transpose_subset(y, cols)
    }
    fn gram_subset(&self, cols: &[usize]) -> DMatrix<f64> {
        (**self).gram_subset(cols)
    }
    fn residual_compensated(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        (**self).residual_compensated(x, y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for Box<T> {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply_into(x, out)
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).apply_transpose_into(y, out)
    }
    fn column(&self, j: usize) -> Vec<f64> {
        (**self).column(j)
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        (**self).column_norms_sq()
    }
    fn apply_subset(&self, cols: &[usize], u: &[f64]) -> Vec<f64> {
        (**self).apply_subset(cols, u)
    }
    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        (**self).apply_transpose_subset(y, cols)
    }
    fn gram_subset(&self, cols: &[usize]) -> DMatrix<f64> {
        (**self).gram_subset(cols)
    }
    fn residual_compensated(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        (**self).residual_compensated(x, y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for std::sync::Arc<T> {
    fn nrows(&self) -> usize {
        (**self).nrows()
    }
    fn ncols(&self) -> usize {
        (**self).ncols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply_into(x, out)
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).apply_transpose_into(y, out)
    }
    fn column(&self, j: usize) -> Vec<f64> {
        (**self).column(j)
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        (**self).column_norms_sq()
    }
    fn apply_subset(&self, cols: &[usize], u: &[f64]) -> Vec<f64> {
        (**self).apply_subset(cols, u)
    }
    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        (**self).apply_transpose_subset(y, cols)
    }
    fn gram_subset(&self, cols: &[usize]) -> DMatrix<f64> {
        (**self).gram_subset(cols)
    }
    fn residual_compensated(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        (**self).residual_compensated(x, y)
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::LinearOperator;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Worst relative adjoint defect over `probes` random pairs.
    pub fn adjoint_defect(a: &dyn LinearOperator, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let x: Vec<f64> = (0..a.ncols()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..a.nrows()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lhs = crate::vecops::dot(&a.apply(&x), &y);
            let rhs = crate::vecops::dot(&x, &a.apply_transpose(&y));
            let scale = crate::vecops::norm(&x) * crate::vecops::norm(&y) + 1.0;
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        worst
    }
}

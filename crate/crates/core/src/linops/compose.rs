use super::{validate_index_set, LinearOperator};
use crate::error::{Error, Result};

/// The identity map on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Identity { n }
    }
}

impl LinearOperator for Identity {
    fn nrows(&self) -> usize {
        self.n
    }
    fn ncols(&self) -> usize {
        self.n
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        vec![1.0; self.n]
    }
}

/// `outer ∘ inner`, i.e. `x ↦ outer(inner(x))`.
pub struct Composed<A, B> {
    outer: A,
    inner: B,
}

impl<A: LinearOperator, B: LinearOperator> Composed<A, B> {
    pub fn new(outer: A, inner: B) -> Result<Self> {
        if outer.ncols() != inner.nrows() {
            return Err(Error::Dimension {
                context: "compose",
                expected: outer.ncols(),
                actual: inner.nrows(),
            });
        }
        Ok(Composed { outer, inner })
    }
}

impl<A: LinearOperator, B: LinearOperator> LinearOperator for Composed<A, B> {
    fn nrows(&self) -> usize {
        self.outer.nrows()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mid = self.inner.apply(x);
        self.outer.apply_into(&mid, out);
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        let mid = self.outer.apply_transpose(y);
        self.inner.apply_transpose_into(&mid, out);
    }
}

/// The adjoint of a wrapped operator.
pub struct Transposed<A>(pub A);

impl<A: LinearOperator> LinearOperator for Transposed<A> {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }
    fn ncols(&self) -> usize {
        self.0.nrows()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.0.apply_transpose_into(x, out)
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.0.apply_into(y, out)
    }
}

/// `factor · A`.
pub struct Scaled<A> {
    factor: f64,
    inner: A,
}

impl<A: LinearOperator> Scaled<A> {
    pub fn new(factor: f64, inner: A) -> Self {
        Scaled { factor, inner }
    }
}

impl<A: LinearOperator> LinearOperator for Scaled<A> {
    fn nrows(&self) -> usize {
        self.inner.nrows()
    }
    fn ncols(&self) -> usize {
        self.inner.ncols()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.inner.apply_into(x, out);
        out.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.inner.apply_transpose_into(y, out);
        out.iter_mut().for_each(|v| *v *= self.factor);
    }
    fn column(&self, j: usize) -> Vec<f64> {
        self.inner.column(j).into_iter().map(|v| v * self.factor).collect()
    }
    fn column_norms_sq(&self) -> Vec<f64> {
        let f2 = self.factor * self.factor;
        self.inner.column_norms_sq().into_iter().map(|v| v * f2).collect()
    }
}

/// Columns of a parent operator restricted to a sorted index set.
pub struct ColumnSubset<'a, A: ?Sized> {
    parent: &'a A,
    index: Vec<usize>,
}

impl<'a, A: LinearOperator + ?Sized> ColumnSubset<'a, A> {
    pub fn new(parent: &'a A, index: Vec<usize>) -> Result<Self> {
        validate_index_set(&index, parent.ncols())?;
        Ok(ColumnSubset { parent, index })
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for ColumnSubset<'_, A> {
    fn nrows(&self) -> usize {
        self.parent.nrows()
    }
    fn ncols(&self) -> usize {
        self.index.len()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut padded = vec![0.0; self.parent.ncols()];
        for (&j, &v) in self.index.iter().zip(x) {
            padded[j] = v;
        }
        self.parent.apply_into(&padded, out);
    }
    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        let full = self.parent.apply_transpose(y);
        for (o, &j) in out.iter_mut().zip(&self.index) {
            *o = full[j];
        }
    }
    fn column(&self, k: usize) -> Vec<f64> {
        self.parent.column(self.index[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{testing::adjoint_defect, DMatrix};

    #[test]
    fn composition_and_transpose_adjoint() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, -1.0, 3.0, 1.0]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.5, 0.0, -1.0, 4.0]);
        let ab = Composed::new(&a, &b).unwrap();
        assert_eq!(ab.apply(&[1.0, 1.0]), (&a * &b * nalgebra::DVector::from_vec(vec![1.0, 1.0])).as_slice().to_vec());
        assert!(adjoint_defect(&ab, 100, 4) <= 1e-10);
        assert!(adjoint_defect(&Transposed(&ab), 100, 5) <= 1e-10);
        assert!(adjoint_defect(&Scaled::new(-2.5, &ab), 100, 6) <= 1e-10);
        assert!(Composed::new(&a, &a).is_err());
    }
}

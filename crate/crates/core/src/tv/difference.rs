use crate::error::{Error, Result};
use crate::linops::{CsrMatrix, LinearOperator};
use crate::tomo::ImageGrid;

/// Forward differences of an `n1 × n2` image, two rows per interior pixel
/// `(i, j)` with `i < n2 − 1`, `j < n1 − 1`: first the horizontal difference
/// `x[i][j+1] − x[i][j]`, then the vertical one `x[i+1][j] − x[i][j]`.
#[derive(Debug, Clone)]
pub struct DifferenceOperator {
    n1: usize,
    n2: usize,
    matrix: CsrMatrix,
}

impl DifferenceOperator {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::invalid(format!("difference operator needs at least 2x2 pixels, got {n1}x{n2}")));
        }
        let rows = 2 * (n1 - 1) * (n2 - 1);
        let mut offsets = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(2 * rows);
        let mut values = Vec::with_capacity(2 * rows);
        offsets.push(0);
        for i in 0..n2 - 1 {
            for j in 0..n1 - 1 {
                let here = i * n1 + j;
                for there in [here + 1, here + n1] {
                    indices.extend([here, there]);
                    values.extend([-1.0, 1.0]);
                    offsets.push(indices.len());
                }
            }
        }
        let matrix = CsrMatrix::new(rows, n1 * n2, offsets, indices, values)?;
        Ok(DifferenceOperator { n1, n2, matrix })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Number of rows of `BᵀB` touching each pixel, i.e. its diagonal.
    pub fn gram_diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.matrix.ncols()];
        for (_, col, v) in self.matrix.triplets() {
            d[col] += v * v;
        }
        d
    }
}

impl LinearOperator for DifferenceOperator {
    fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.apply_into(x, out)
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        self.matrix.apply_transpose_into(y, out)
    }
}

/// Anisotropic total variation, summed in the row order of [`DifferenceOperator`].
pub fn tv_value(img: &ImageGrid) -> f64 {
    tv_of(img.values(), img.n1(), img.n2())
}

pub(crate) fn tv_of(x: &[f64], n1: usize, n2: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n2 - 1 {
        for j in 0..n1 - 1 {
            let here = i * n1 + j;
            sum += (x[here + 1] - x[here]).abs();
            sum += (x[here + n1] - x[here]).abs();
        }
    }
    sum
}

use crate::error::{Error, Result};

/// A 2-D image on `[-1,1]^2`, `n1` columns by `n2` rows, stored row-major.
///
/// Row 0 is the top of the image (largest y).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    n1: usize,
    n2: usize,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn new(n1: usize, n2: usize, values: Vec<f64>) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::invalid(format!("image must be at least 2x2, got {n1}x{n2}")));
        }
        if values.len() != n1 * n2 {
            return Err(Error::Dimension {
                context: "image values",
                expected: n1 * n2,
                actual: values.len(),
            });
        }
        if !crate::vecops::all_finite(&values) {
            return Err(Error::invalid("image values must be finite"));
        }
        Ok(ImageGrid { n1, n2, values })
    }

    pub fn zeros(n1: usize, n2: usize) -> Result<Self> {
        Self::new(n1, n2, vec![0.0; n1 * n2])
    }

    pub fn constant(n1: usize, n2: usize, value: f64) -> Result<Self> {
        Self::new(n1, n2, vec![value; n1 * n2])
    }

    /// Number of columns.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of rows.
    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pixel at `row`, `col` (0-based).
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n1 + col]
    }

    pub fn pixel_width(&self) -> f64 {
        2.0 / self.n1 as f64
    }

    pub fn pixel_height(&self) -> f64 {
        2.0 / self.n2 as f64
    }

    /// Sum of pixel values times pixel area.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.pixel_width() * self.pixel_height()
    }
}

/// Parallel-beam projection data, angle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    angles: Vec<f64>,
    offsets: Vec<f64>,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(angles: Vec<f64>, offsets: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || offsets.is_empty() {
            return Err(Error::invalid("sinogram needs at least one angle and one offset"));
        }
        if angles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sinogram angles must be strictly increasing"));
        }
        let n = offsets.len();
        let scale = offsets.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if (0..n).any(|k| (offsets[k] + offsets[n - 1 - k]).abs() > 1e-9 * scale) {
            return Err(Error::invalid("sinogram offsets must be symmetric about 0"));
        }
        if values.len() != angles.len() * n {
            return Err(Error::Dimension {
                context: "sinogram values",
                expected: angles.len() * n,
                actual: values.len(),
            });
        }
        Ok(Sinogram {
            angles,
            offsets,
            values,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Projection values for one angle.
    pub fn row(&self, angle_index: usize) -> &[f64] {
        let n = self.offsets.len();
        &self.values[angle_index * n..(angle_index + 1) * n]
    }
}

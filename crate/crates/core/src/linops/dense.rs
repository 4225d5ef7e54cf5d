use super::LinearOperator;
use crate::vecops::Compensated;
use nalgebra::DMatrix;

impl LinearOperator for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        // column-major storage: accumulate columns in index order
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.column(j).iter()) {
                *o += a * xj;
            }
        }
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.column(j).iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.column(j).iter().copied().collect()
    }

    fn residual_compensated(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut acc: Vec<Compensated> = y.iter().map(|v| Compensated::new(-v, 0.0)).collect();
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (c, a) in acc.iter_mut().zip(self.column(j).iter()) {
                c.add_product(*a, xj);
            }
        }
        Some(acc.into_iter().map(|c| {
            let c = Compensated::new(c.hi, c.lo);
            (c.hi, c.lo)
        }).unzip())
    }

    fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.column(j).norm_squared()).collect()
    }

    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        cols.iter()
            .map(|&j| self.column(j).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }
}

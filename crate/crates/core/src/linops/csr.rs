use super::{DMatrix, LinearOperator};
use crate::error::{Error, Result};
use crate::vecops::Compensated;
use rayon::prelude::*;

/// Row count above which products are split across the rayon pool.
const PARALLEL_ROWS: usize = 4096;

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. The transpose is
/// stored alongside in the same format so both products are row-parallel
/// without scatter.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    transpose: Option<Box<CsrMatrix>>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating the layout.
    pub fn new(
        nrows: usize,
        ncols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if offsets.len() != nrows + 1 {
            return Err(Error::invalid(format!(
                "row offsets must have length {}, got {}",
                nrows + 1,
                offsets.len()
            )));
        }
        if offsets[0] != 0 || offsets[nrows] != indices.len() || indices.len() != values.len() {
            return Err(Error::invalid("inconsistent CSR offsets/indices/values"));
        }
        for r in 0..nrows {
            let (lo, hi) = (offsets[r], offsets[r + 1]);
            if lo > hi {
                return Err(Error::invalid(format!("row offsets decrease at row {r}")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
            if row.last().is_some_and(|&c| c >= ncols) {
                return Err(Error::invalid(format!("column index out of range in row {r}")));
            }
        }
        let mut m = CsrMatrix {
            nrows,
            ncols,
            offsets,
            indices,
            values,
            transpose: None,
        };
        m.transpose = Some(Box::new(m.transposed_raw()));
        Ok(m)
    }

    /// Builds a matrix from (row, col, value) triplets. Duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= nrows || c >= ncols {
                return Err(Error::invalid(format!(
                    "triplet ({r}, {c}) out of range for {nrows}x{ncols}"
                )));
            }
        }
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut offsets = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            indices.push(c);
            values.push(v);
            offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..nrows {
            offsets[r + 1] += offsets[r];
        }
        Self::new(nrows, ncols, offsets, indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, n, (0..=n).collect(), (0..n).collect(), vec![1.0; n]).unwrap()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates over the stored entries of one row as (column, value).
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.offsets[r], self.offsets[r + 1]);
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    /// All stored entries as (row, col, value), row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut t = self.transposed_raw();
        t.transpose = Some(Box::new(self.clone_shallow()));
        t
    }

    fn clone_shallow(&self) -> CsrMatrix {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            offsets: self.offsets.clone(),
            indices: self.indices.clone(),
            values: self.values.clone(),
            transpose: None,
        }
    }

    fn transposed_raw(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let offsets = counts.clone();
        let mut next = counts;
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // rows visited in increasing order keep the transposed rows sorted
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                let slot = next[c];
                indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            offsets,
            indices,
            values,
            transpose: None,
        }
    }

    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in self.offsets[r]..self.offsets[r + 1] {
            acc += self.values[k] * x[self.indices[k]];
        }
        acc
    }

    fn row_residual_compensated(&self, r: usize, x: &[f64], y: f64) -> (f64, f64) {
        let mut acc = Compensated::new(-y, 0.0);
        for k in self.offsets[r]..self.offsets[r + 1] {
            acc.add_product(self.values[k], x[self.indices[k]]);
        }
        let c = Compensated::new(acc.hi, acc.lo);
        (c.hi, c.lo)
    }

    fn spmv(&self, x: &[f64], out: &mut [f64]) {
        if self.nrows >= PARALLEL_ROWS && rayon::current_num_threads() > 1 {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(r, o)| *o = self.row_dot(r, x));
        } else {
            for (r, o) in out.iter_mut().enumerate() {
                *o = self.row_dot(r, x);
            }
        }
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.spmv(x, out);
    }

    fn apply_transpose_into(&self, y: &[f64], out: &mut [f64]) {
        match &self.transpose {
            Some(t) => t.spmv(y, out),
            None => self.transposed_raw().spmv(y, out),
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.nrows];
        let t = self.transpose.as_deref().expect("transpose built at construction");
        for (r, v) in t.row(j) {
            col[r] = v;
        }
        col
    }

    fn column_norms_sq(&self) -> Vec<f64> {
        let t = self.transpose.as_deref().expect("transpose built at construction");
        (0..self.ncols)
            .map(|j| t.row(j).map(|(_, v)| v * v).sum())
            .collect()
    }

    fn residual_compensated(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        let rows = 0..self.nrows;
        Some(if self.nrows >= PARALLEL_ROWS && rayon::current_num_threads() > 1 {
            rows.into_par_iter().map(|r| self.row_residual_compensated(r, x, y[r])).unzip()
        } else {
            rows.map(|r| self.row_residual_compensated(r, x, y[r])).unzip()
        })
    }

    fn apply_subset(&self, cols: &[usize], u: &[f64]) -> Vec<f64> {
        let t = self.transpose.as_deref().expect("transpose built at construction");
        let mut out = vec![0.0; self.nrows];
        for (&j, &v) in cols.iter().zip(u) {
            for (r, a) in t.row(j) {
                out[r] += a * v;
            }
        }
        out
    }

    fn apply_transpose_subset(&self, y: &[f64], cols: &[usize]) -> Vec<f64> {
        let t = self.transpose.as_deref().expect("transpose built at construction");
        cols.iter().map(|&j| t.row(j).map(|(r, v)| v * y[r]).sum()).collect()
    }

    fn gram_subset(&self, cols: &[usize]) -> DMatrix<f64> {
        let k = cols.len();
        let mut slot = vec![usize::MAX; self.ncols];
        for (pos, &j) in cols.iter().enumerate() {
            slot[j] = pos;
        }
        let mut g = DMatrix::zeros(k, k);
        let mut entries = Vec::new();
        for r in 0..self.nrows {
            entries.clear();
            entries.extend(self.row(r).filter(|(c, _)| slot[*c] != usize::MAX).map(|(c, v)| (slot[c], v)));
            for &(a, va) in &entries {
                for &(b, vb) in &entries {
                    g[(a, b)] += va * vb;
                }
            }
        }
        g
    }
}

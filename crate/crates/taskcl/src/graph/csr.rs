//! Compressed sparse row matrices and the sparse-dense product.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Sparse real matrix in CSR layout.
///
/// Column indices are sorted and unique within each row, offsets are
/// monotone, and all values are finite; [`CsrMatrix::new`] enforces this.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if offsets.len() != rows + 1 {
            return Err(Error::invalid(format!(
                "csr: offsets length {} != rows + 1 = {}",
                offsets.len(),
                rows + 1
            )));
        }
        if offsets[0] != 0 || *offsets.last().unwrap() != indices.len() {
            return Err(Error::invalid("csr: offsets must span the index array"));
        }
        if indices.len() != values.len() {
            return Err(Error::invalid("csr: indices/values length mismatch"));
        }
        for r in 0..rows {
            if offsets[r] > offsets[r + 1] {
                return Err(Error::invalid("csr: offsets not monotone"));
            }
            let row = &indices[offsets[r]..offsets[r + 1]];
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!(
                        "csr: row {r} column indices not sorted/unique"
                    )));
                }
            }
            if let Some(&last) = row.last() {
                if last >= cols {
                    return Err(Error::invalid(format!(
                        "csr: row {r} column index {last} out of range {cols}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("csr: non-finite value"));
        }
        Ok(Self {
            rows,
            cols,
            offsets,
            indices,
            values,
        })
    }

    /// Build from per-row `(column, value)` lists; each list must be sorted
    /// by column with unique columns.
    pub fn from_rows(cols: usize, row_entries: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let rows = row_entries.len();
        let mut offsets = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for entries in row_entries {
            for (c, v) in entries {
                indices.push(c);
                values.push(v);
            }
            offsets.push(indices.len());
        }
        Self::new(rows, cols, offsets, indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            offsets: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.offsets[r];
        let hi = self.offsets[r + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_indices(&self, r: usize) -> &[usize] {
        self.row(r).0
    }

    /// Entry lookup; unstored entries read as 0.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        match idx.binary_search(&c) {
            Ok(p) => val[p],
            Err(_) => 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Sparse-dense product `self * b`.
    pub fn spmm(&self, b: &ArrayView2<f64>) -> Result<Array2<f64>> {
        if self.cols != b.nrows() {
            return Err(Error::invalid(format!(
                "spmm: inner dimensions disagree ({}x{} * {}x{})",
                self.rows,
                self.cols,
                b.nrows(),
                b.ncols()
            )));
        }
        let mut out = Array2::<f64>::zeros((self.rows, b.ncols()));
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let mut out_row = out.row_mut(r);
            for (&c, &v) in idx.iter().zip(val) {
                let b_row = b.row(c);
                for (o, &x) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    /// Transposed sparse-dense product `self^T * b`.
    pub fn spmm_t(&self, b: &ArrayView2<f64>) -> Result<Array2<f64>> {
        if self.rows != b.nrows() {
            return Err(Error::invalid(format!(
                "spmm_t: inner dimensions disagree ({}x{} with {}x{})",
                self.cols,
                self.rows,
                b.nrows(),
                b.ncols()
            )));
        }
        let mut out = Array2::<f64>::zeros((self.cols, b.ncols()));
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let b_row = b.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                let mut out_row = out.row_mut(c);
                for (o, &x) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::<f64>::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                out[(r, c)] = v;
            }
        }
        out
    }
}

/// Free-function alias for the sparse-dense product.
pub fn spmm(a: &CsrMatrix, b: &ArrayView2<f64>) -> Result<Array2<f64>> {
    a.spmm(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identity_times_b_is_b() {
        let b = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        let i = CsrMatrix::identity(3);
        assert_eq!(i.spmm(&b.view()).unwrap(), b);
    }

    #[test]
    fn zero_matrix_times_b_is_zero() {
        let z = CsrMatrix::from_rows(2, vec![vec![], vec![]]).unwrap();
        let b = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(z.spmm(&b.view()).unwrap(), Array2::<f64>::zeros((2, 2)));
    }

    #[test]
    fn swap_matrix_hand_product() {
        // [[0,1],[1,0]] * [[1,2],[3,4]] = [[3,4],[1,2]]
        let a = CsrMatrix::from_rows(2, vec![vec![(1, 1.0)], vec![(0, 1.0)]]).unwrap();
        let b = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(a.spmm(&b.view()).unwrap(), array![[3.0, 4.0], [1.0, 2.0]]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CsrMatrix::identity(2);
        let b = Array2::<f64>::zeros((3, 2));
        assert!(a.spmm(&b.view()).is_err());
    }

    #[test]
    fn spmm_t_matches_dense_transpose() {
        let a = CsrMatrix::from_rows(3, vec![vec![(0, 2.0), (2, 1.0)], vec![(1, -1.0)]]).unwrap();
        let b = array![[1.0, 0.5], [2.0, 1.5]];
        let dense = a.to_dense();
        let want = dense.t().dot(&b);
        let got = a.spmm_t(&b.view()).unwrap();
        assert!(want
            .iter()
            .zip(got.iter())
            .all(|(w, g)| (w - g).abs() < 1e-12));
    }

    #[test]
    fn invalid_layout_rejected() {
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![5], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
    }
}

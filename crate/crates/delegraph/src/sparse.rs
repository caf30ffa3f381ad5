//! Minimal CSR (compressed sparse row) matrix: O(nnz) storage, O(nnz)
//! matrix-vector product, sequential accumulation for determinism.

/// Square-or-rectangular sparse matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>, // len = n_rows + 1
    col_idx: Vec<usize>, // len = nnz
    values: Vec<f64>,    // len = nnz
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets. Triplets are sorted by
    /// `(row, col)`; duplicate coordinates are not merged and must not occur.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<&(usize, usize, f64)> = triplets.iter().collect();
        sorted.sort_by_key(|(r, c, _)| (*r, *c));

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        row_ptr.push(0);
        let mut row = 0;
        for &&(r, c, v) in &sorted {
            debug_assert!(r < n_rows && c < n_cols);
            while row < r {
                row_ptr.push(col_idx.len());
                row += 1;
            }
            debug_assert!(
                col_idx.is_empty()
                    || row_ptr.last() == Some(&col_idx.len())
                    || *col_idx.last().unwrap() != c,
                "duplicate entry at ({r}, {c})"
            );
            col_idx.push(c);
            values.push(v);
        }
        while row < n_rows {
            row_ptr.push(col_idx.len());
            row += 1;
        }
        CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A·x`. Sequential row order, sequential accumulation within each
    /// row, so results are bit-reproducible across runs.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// Entry at `(row, col)`, zero if not stored.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        for k in self.row_ptr[row]..self.row_ptr[row + 1] {
            if self.col_idx[k] == col {
                return self.values[k];
            }
        }
        0.0
    }

    /// Stored entries of one row as `(col, value)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                triplets.push((self.col_idx[k], r, self.values[k]));
            }
        }
        CsrMatrix::from_triplets(self.n_cols, self.n_rows, &triplets)
    }
}

//! Dense LU factorization with partial pivoting, used by the direct solver
//! and the attribution transpose-solves. Row-major, desk-scale only; the
//! iterative path never touches this module.

// Substitution kernels index flat row-major storage; range loops read
// clearer than iterator chains here.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// `P·A = L·U` factors of a square matrix, stored packed in one buffer.
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,     // row-major; L below diagonal (unit diag), U on/above
    perm: Vec<usize>, // perm[i] = original row now in position i
}

impl LuFactors {
    /// Factors `a` (row-major, `n x n`), consuming the buffer.
    /// Fails with [`Error::SingularSystem`] on a (numerically) zero pivot.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<LuFactors> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_abs = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > pivot_abs {
                    pivot_abs = v;
                    pivot_row = r;
                }
            }
            if pivot_abs < 1e-12 {
                return Err(Error::SingularSystem);
            }
            if pivot_row != col {
                for c in 0..n {
                    a.swap(col * n + c, pivot_row * n + c);
                }
                perm.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                a[r * n + col] = factor;
                for c in col + 1..n {
                    a[r * n + c] -= factor * a[col * n + c];
                }
            }
        }
        Ok(LuFactors { n, lu: a, perm })
    }

    /// Solves `A·x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Apply the row permutation, then forward- and back-substitute.
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            let mut acc = x[r];
            for c in 0..r {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r];
            for c in r + 1..n {
                acc -= self.lu[r * n + c] * x[c];
            }
            x[r] = acc / self.lu[r * n + r];
        }
        x
    }

    /// Solves `Aᵀ·x = b` using the same factors:
    /// `Aᵀ = Uᵀ·Lᵀ·P`, so solve `Uᵀz = b`, `Lᵀw = z`, then undo the
    /// permutation.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = b.to_vec();
        // Uᵀ is lower triangular: forward substitution.
        for r in 0..n {
            let mut acc = z[r];
            for c in 0..r {
                acc -= self.lu[c * n + r] * z[c];
            }
            z[r] = acc / self.lu[r * n + r];
        }
        // Lᵀ is unit upper triangular: back substitution.
        for r in (0..n).rev() {
            let mut acc = z[r];
            for c in r + 1..n {
                acc -= self.lu[c * n + r] * z[c];
            }
            z[r] = acc;
        }
        // x[perm[i]] = w[i]
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}

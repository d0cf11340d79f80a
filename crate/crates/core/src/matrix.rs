//! Row-major dense matrix with cached squared row/column norms.
//!
//! The samplers draw indices with probability proportional to these cached
//! norms, and the solver inner loops touch single rows or columns only, so
//! the caches are computed once at construction and the matrix is immutable
//! afterwards. That also makes sharing one matrix across concurrent trials
//! safe. Row-major storage favors the row picks that dominate the inner
//! loops; column access is strided.

use crate::error::Error;

/// Immutable dense real matrix, row-major, with squared row norms, squared
/// column norms, and the squared Frobenius norm precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
    row_norms_sq: Vec<f64>,
    col_norms_sq: Vec<f64>,
    frob_sq: f64,
}

impl DenseMatrix {
    /// Build from row-major data. Panics if `data.len() != m * n` or if a
    /// dimension is zero; those are programming errors, not inputs.
    pub fn from_vec(m: usize, n: usize, data: Vec<f64>) -> Self {
        assert!(m > 0 && n > 0, "matrix dimensions must be positive");
        assert_eq!(data.len(), m * n, "data length must equal m * n");
        let mut row_norms_sq = vec![0.0; m];
        let mut col_norms_sq = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                let v = data[i * n + j];
                row_norms_sq[i] += v * v;
                col_norms_sq[j] += v * v;
            }
        }
        let frob_sq = row_norms_sq.iter().sum();
        DenseMatrix {
            m,
            n,
            data,
            row_norms_sq,
            col_norms_sq,
            frob_sq,
        }
    }

    /// Build from explicit rows.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty(), "need at least one row");
        let n = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n);
        for row in rows {
            assert_eq!(row.len(), n, "all rows must have the same length");
            data.extend_from_slice(row);
        }
        Self::from_vec(rows.len(), n, data)
    }

    /// Build by evaluating `f(i, j)` for every entry.
    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_vec(m, n, data)
    }

    /// n-by-n identity.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// The `i`th row as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// Cached squared row norms: entry `i` is `sum_j A[i][j]^2`.
    pub fn squared_row_norms(&self) -> &[f64] {
        &self.row_norms_sq
    }

    /// Cached squared column norms: entry `j` is `sum_i A[i][j]^2`.
    pub fn squared_col_norms(&self) -> &[f64] {
        &self.col_norms_sq
    }

    /// Squared Frobenius norm (sum of all squared entries).
    pub fn frobenius_sq(&self) -> f64 {
        self.frob_sq
    }

    /// Dot product of row `i` with `x` (length n). The solver hot path.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        dot(self.row(i), x)
    }

    /// Dot product of column `j` with `z` (length m). Strided access.
    pub fn col_dot(&self, j: usize, z: &[f64]) -> f64 {
        self.data[j..]
            .iter()
            .step_by(self.n)
            .zip(z)
            .map(|(a, zi)| a * zi)
            .sum()
    }

    /// `A v`. Full pass over the matrix; used by the oracle and residual
    /// reports, never by the solver inner loops.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>, Error> {
        check_len("matvec input", self.n, v.len())?;
        Ok((0..self.m).map(|i| self.row_dot(i, v)).collect())
    }

    /// `A^T u`. Same cost caveat as [`DenseMatrix::matvec`].
    pub fn transpose_matvec(&self, u: &[f64]) -> Result<Vec<f64>, Error> {
        check_len("transpose_matvec input", self.m, u.len())?;
        let mut out = vec![0.0; self.n];
        for (row, &ui) in self.data.chunks_exact(self.n).zip(u) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * ui;
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<(), Error> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        });
    }
    Ok(())
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// Componentwise `a - b`.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Squared distance `|a - b|^2` without allocating.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

//! Exact reference quantities for the extended normal equations
//! `A^T A x = A^T b - c`.
//!
//! Everything here is SVD-based and costs a full dense decomposition, so it
//! is meant for verification, error tracking, and bound curves at desk
//! scale. The solvers never call into this module from their inner loops.
//!
//! With the thin SVD `A = U S V^T` (r = numerical rank):
//!
//! * pseudoinverse        `A+   = V S^-1 U^T`
//! * adjoint pseudoinverse `(A^T)+ = U S^-1 V^T`
//! * Gram pseudoinverse   `(A^T A)+ = V S^-2 V^T`
//! * row-space projector  `A+ A = V V^T`, column-space projector `A A+ = U U^T`
//!
//! and the contraction constant is `rho = 1 - sigma_min^2 / |A|_F^2` with
//! `sigma_min` the smallest singular value counted in the rank.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::matrix::{check_len, dist_sq, norm, sub, DenseMatrix};

/// Whether `c` lies in the row space of `A` (so the extended normal
/// equations admit an exact solution) or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

/// Relative tolerance for the consistency classification. Generated
/// problems are either exactly consistent by construction or carry a full
/// null-space component, so this only guards round-off.
pub const TOL_CONSISTENCY: f64 = 1e-10;

/// Thin SVD of a nonzero matrix with the numerical rank and the blocks
/// needed to apply pseudoinverses and projectors.
#[derive(Debug, Clone)]
pub struct SpectralData {
    m: usize,
    n: usize,
    rank: usize,
    /// All min(m, n) singular values, descending.
    singular_values: Vec<f64>,
    /// Left singular vectors, m x min(m, n).
    u: DMatrix<f64>,
    /// Right singular vectors, n x min(m, n).
    v: DMatrix<f64>,
    frob_sq: f64,
}

impl SpectralData {
    /// Decompose `a`. A singular value counts toward the rank iff it
    /// exceeds `max(m, n) * eps * sigma_max`, the standard numerical-rank
    /// convention.
    pub fn new(a: &DenseMatrix) -> Result<Self, Error> {
        if a.frobenius_sq() <= 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let (m, n) = (a.nrows(), a.ncols());
        let svd = DMatrix::from_row_slice(m, n, a.entries()).svd(true, true);
        let u = svd.u.expect("svd requested u");
        let v = svd.v_t.expect("svd requested v_t").transpose();
        let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
        let sigma_max = singular_values[0];
        let cutoff = m.max(n) as f64 * f64::EPSILON * sigma_max;
        let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
        debug_assert!(rank >= 1);
        Ok(SpectralData {
            m,
            n,
            rank,
            singular_values,
            u,
            v,
            frob_sq: a.frobenius_sq(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    /// Numerical rank r.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All min(m, n) singular values, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    /// Smallest singular value counted in the rank.
    pub fn sigma_min(&self) -> f64 {
        self.singular_values[self.rank - 1]
    }

    /// `rho = 1 - sigma_min^2 / |A|_F^2`, in [0, 1) for any nonzero matrix.
    pub fn rho(&self) -> f64 {
        1.0 - self.sigma_min() * self.sigma_min() / self.frob_sq
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.frob_sq
    }

    /// Frobenius norm of `A^T A`, i.e. sqrt(sum sigma_i^4).
    pub fn gram_frobenius(&self) -> f64 {
        self.singular_values[..self.rank]
            .iter()
            .map(|s| s.powi(4))
            .sum::<f64>()
            .sqrt()
    }

    fn rank_cols_u(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.u.columns(0, self.rank)
    }

    fn rank_cols_v(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.v.columns(0, self.rank)
    }

    /// `A+ u` (length m -> length n).
    pub fn apply_pinv(&self, u: &[f64]) -> Vec<f64> {
        let mut t = self.rank_cols_u().transpose() * DVector::from_column_slice(u);
        for k in 0..self.rank {
            t[k] /= self.singular_values[k];
        }
        (self.rank_cols_v() * t).as_slice().to_vec()
    }

    /// `(A^T)+ v = (A+)^T v` (length n -> length m).
    pub fn apply_pinv_adjoint(&self, v: &[f64]) -> Vec<f64> {
        let mut t = self.rank_cols_v().transpose() * DVector::from_column_slice(v);
        for k in 0..self.rank {
            t[k] /= self.singular_values[k];
        }
        (self.rank_cols_u() * t).as_slice().to_vec()
    }

    /// `(A^T A)+ v` (length n -> length n).
    pub fn apply_gram_pinv(&self, v: &[f64]) -> Vec<f64> {
        let mut t = self.rank_cols_v().transpose() * DVector::from_column_slice(v);
        for k in 0..self.rank {
            let s = self.singular_values[k];
            t[k] /= s * s;
        }
        (self.rank_cols_v() * t).as_slice().to_vec()
    }

    /// Orthogonal projection onto the row space, `A+ A x = V V^T x`.
    pub fn project_row_space(&self, x: &[f64]) -> Vec<f64> {
        let t = self.rank_cols_v().transpose() * DVector::from_column_slice(x);
        (self.rank_cols_v() * t).as_slice().to_vec()
    }

    /// Orthogonal projection onto the column space, `A A+ z = U U^T z`.
    pub fn project_col_space(&self, z: &[f64]) -> Vec<f64> {
        let t = self.rank_cols_u().transpose() * DVector::from_column_slice(z);
        (self.rank_cols_u() * t).as_slice().to_vec()
    }

    /// Is `c` in the row space? `c = 0` classifies as consistent.
    pub fn classify_consistency(&self, c: &[f64]) -> Consistency {
        let c_norm = norm(c);
        if c_norm == 0.0 {
            return Consistency::Consistent;
        }
        let outside = sub(c, &self.project_row_space(c));
        if norm(&outside) <= TOL_CONSISTENCY * c_norm {
            Consistency::Consistent
        } else {
            Consistency::Inconsistent
        }
    }

    /// Orthonormal basis of the null space of `A`, as an n x (n - r)
    /// matrix. Returns a 0-column matrix when r = n.
    ///
    /// For m >= n the thin SVD carries all n right singular vectors and the
    /// basis is columns r..n. For m < n the thin SVD only spans m
    /// directions, so the basis is completed from the spectral
    /// decomposition of the null-space projector `I - V V^T`.
    pub fn null_space_basis(&self) -> DMatrix<f64> {
        let null_dim = self.n - self.rank;
        if null_dim == 0 {
            return DMatrix::zeros(self.n, 0);
        }
        if self.v.ncols() == self.n {
            return self.v.columns(self.rank, null_dim).into_owned();
        }
        let vr = self.rank_cols_v();
        let projector = DMatrix::identity(self.n, self.n) - vr * vr.transpose();
        let svd = projector.svd(true, false);
        let u = svd.u.expect("svd requested u");
        // Eigenvalues of the projector are 1 (null directions) and 0; the
        // sorted SVD puts the null-space basis first.
        debug_assert!(svd.singular_values[null_dim - 1] > 0.5);
        u.columns(0, null_dim).into_owned()
    }
}

/// Convenience wrapper: decompose and return `rho` directly.
pub fn rho(a: &DenseMatrix) -> Result<f64, Error> {
    Ok(SpectralData::new(a)?.rho())
}

/// Convenience wrapper over [`SpectralData::classify_consistency`].
pub fn classify_consistency(a: &DenseMatrix, c: &[f64]) -> Result<Consistency, Error> {
    check_len("classify_consistency c", a.ncols(), c.len())?;
    Ok(SpectralData::new(a)?.classify_consistency(c))
}

/// Oracle-computed limits of the three iterations, the contraction
/// constant, and the squared initial-gap norms that feed the bounds.
#[derive(Debug, Clone)]
pub struct ReferenceSolutions {
    /// Limit of the x-iteration: `(I - A+ A) x0 + A+ b - (A^T A)+ c`.
    pub x_star: Vec<f64>,
    /// Limit of the z-iteration: `(I - A A+) b + (A^T)+ c`.
    pub z_star: Vec<f64>,
    /// Limit of the y-iteration: `(I - A+ A) c`.
    pub y_star: Vec<f64>,
    pub rho: f64,
    pub frob_sq: f64,
    /// `|x0 - x_star|^2`
    pub norm_sq_x0_gap: f64,
    /// `|z0 - z_star|^2`
    pub norm_sq_z0_gap: f64,
    /// `|y0 - y_star|^2`
    pub norm_sq_y0_gap: f64,
}

impl ReferenceSolutions {
    /// Compute from an existing decomposition. The gap norms are measured
    /// against the provided initial vectors, so pass the same `x0`, `z0`,
    /// `y0` the solver run will use.
    pub fn compute(
        spectral: &SpectralData,
        b: &[f64],
        c: &[f64],
        x0: &[f64],
        z0: &[f64],
        y0: &[f64],
    ) -> Result<Self, Error> {
        let (m, n) = (spectral.nrows(), spectral.ncols());
        check_len("reference_solutions b", m, b.len())?;
        check_len("reference_solutions c", n, c.len())?;
        check_len("reference_solutions x0", n, x0.len())?;
        check_len("reference_solutions z0", m, z0.len())?;
        check_len("reference_solutions y0", n, y0.len())?;

        let pinv_b = spectral.apply_pinv(b);
        let gram_c = spectral.apply_gram_pinv(c);
        let x0_row = spectral.project_row_space(x0);
        let x_star: Vec<f64> = (0..n).map(|j| x0[j] - x0_row[j] + pinv_b[j] - gram_c[j]).collect();

        let b_col = spectral.project_col_space(b);
        let adj_c = spectral.apply_pinv_adjoint(c);
        let z_star: Vec<f64> = (0..m).map(|i| b[i] - b_col[i] + adj_c[i]).collect();

        let c_row = spectral.project_row_space(c);
        let y_star: Vec<f64> = (0..n).map(|j| c[j] - c_row[j]).collect();

        Ok(ReferenceSolutions {
            rho: spectral.rho(),
            frob_sq: spectral.frobenius_sq(),
            norm_sq_x0_gap: dist_sq(x0, &x_star),
            norm_sq_z0_gap: dist_sq(z0, &z_star),
            norm_sq_y0_gap: dist_sq(y0, &y_star),
            x_star,
            z_star,
            y_star,
        })
    }

    /// Squared error of an x-iterate against the reference limit.
    pub fn sq_error(&self, x: &[f64]) -> f64 {
        dist_sq(x, &self.x_star)
    }
}

/// Decompose and compute reference solutions in one call.
pub fn reference_solutions(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    x0: &[f64],
    z0: &[f64],
    y0: &[f64],
) -> Result<ReferenceSolutions, Error> {
    let spectral = SpectralData::new(a)?;
    ReferenceSolutions::compute(&spectral, b, c, x0, z0, y0)
}

/// Single-Kaczmarz bound: `rho^k * gap_x` with `gap_x = |x0 - x_star|^2`.
pub fn bound_rk(k: usize, rho: f64, gap_x: f64) -> f64 {
    rho.powi(k as i32) * gap_x
}

/// Double-Kaczmarz bound:
/// `k rho^k / |A|_F^2 * gap_z + rho^k * gap_x` (all gaps squared norms).
pub fn bound_rdk(k: usize, rho: f64, frob_sq: f64, gap_z: f64, gap_x: f64) -> f64 {
    let rk = rho.powi(k as i32);
    k as f64 * rk / frob_sq * gap_z + rk * gap_x
}

/// Triple-Kaczmarz bound:
/// `k(k+1) rho^k / (2 |A|_F^4) * gap_y + k rho^k / |A|_F^2 * gap_z + rho^k * gap_x`.
///
/// All three gaps enter as squared norms, matching the recursion the bound
/// telescopes from.
pub fn bound_rtk(k: usize, rho: f64, frob_sq: f64, gap_y: f64, gap_z: f64, gap_x: f64) -> f64 {
    let rk = rho.powi(k as i32);
    let kf = k as f64;
    kf * (kf + 1.0) * rk / (2.0 * frob_sq * frob_sq) * gap_y + kf * rk / frob_sq * gap_z + rk * gap_x
}

/// One x-step split into its projection part and the contamination from an
/// inexact z-iterate.
///
/// `x_hat` is where the step would have landed had the z-iterate been
/// exact; `noise_part = x_next - x_hat` is parallel to the picked row and
/// `contraction_part = x_hat - x_star` is orthogonal to it, so
/// `|x_next - x_star|^2 = |noise_part|^2 + |contraction_part|^2`.
#[derive(Debug, Clone)]
pub struct StepDecomposition {
    pub x_hat: Vec<f64>,
    pub noise_part: Vec<f64>,
    pub contraction_part: Vec<f64>,
}

/// Split the x-step `x_prev -> x_next` taken on row `i` around the
/// reference limit `x_star` (row `i` sees only the row-space part of
/// `x_star`, so the exact-z landing point is the projection of `x_prev`
/// toward `x_star` along the row).
pub fn decompose_step(
    a: &DenseMatrix,
    x_prev: &[f64],
    x_next: &[f64],
    x_star: &[f64],
    i: usize,
) -> Result<StepDecomposition, Error> {
    let n = a.ncols();
    check_len("decompose_step x_prev", n, x_prev.len())?;
    check_len("decompose_step x_next", n, x_next.len())?;
    check_len("decompose_step x_star", n, x_star.len())?;
    let row_norm_sq = a.squared_row_norms()[i];
    if row_norm_sq <= 0.0 {
        return Err(Error::ZeroRow(i));
    }
    let diff = sub(x_prev, x_star);
    let coef = a.row_dot(i, &diff) / row_norm_sq;
    let row = a.row(i);
    let x_hat: Vec<f64> = (0..n).map(|j| x_prev[j] - coef * row[j]).collect();
    Ok(StepDecomposition {
        noise_part: sub(x_next, &x_hat),
        contraction_part: sub(&x_hat, x_star),
        x_hat,
    })
}

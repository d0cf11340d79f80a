//! Synthetic problem construction with known rank, bounded condition
//! number, and a chosen consistency class.
//!
//! `A = U D V^T` where `U` (m x r) and `V` (n x r) come from thin QR
//! factorizations of standard-Gaussian matrices and `D` is diagonal with
//! entries uniform in [1, kappa]. The realized condition number is
//! therefore bounded by `kappa`, and the nonzero singular values of `A`
//! are exactly the entries of `D`.
//!
//! `b` is standard Gaussian. For a consistent instance `c = A^T w` with
//! Gaussian `w`; for an inconsistent one `c = g + N h` with Gaussian `g`,
//! `h` and `N` an orthonormal null-space basis of `A`, which leaves a
//! nonzero component outside the row space almost surely (and is verified
//! post hoc by the consistency classifier in tests).
//!
//! Generation consumes a single [`SeededRng`] stream in a fixed order
//! (U entries row-major, V entries row-major, D entries, then b, then the
//! c ingredients), so the same spec and seed reproduce the instance
//! bit for bit. The generation seed is separate from any solver seed:
//! instances and runs are independently replayable.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::matrix::DenseMatrix;
use crate::oracle::SpectralData;
use crate::sampling::SeededRng;

/// Generation parameters: dimensions, target rank, condition bound,
/// consistency class, and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub kappa: f64,
    pub seed: u64,
    pub consistent: bool,
}

impl GenSpec {
    /// Check the parameter constraints: positive dimensions,
    /// `1 <= r <= min(m, n)`, `kappa >= 1`, and `r < n` whenever an
    /// inconsistent right-hand side is requested (with `r = n` the row
    /// space is all of R^n and nothing lies outside it).
    pub fn validate(&self) -> Result<(), Error> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidGenSpec(format!(
                "dimensions must be positive, got {}x{}",
                self.m, self.n
            )));
        }
        if self.r == 0 || self.r > self.m.min(self.n) {
            return Err(Error::InvalidGenSpec(format!(
                "rank must satisfy 1 <= r <= min(m, n) = {}, got {}",
                self.m.min(self.n),
                self.r
            )));
        }
        if !self.kappa.is_finite() || self.kappa < 1.0 {
            return Err(Error::InvalidGenSpec(format!(
                "kappa must be >= 1, got {}",
                self.kappa
            )));
        }
        if !self.consistent && self.r == self.n {
            return Err(Error::InconsistentImpossible);
        }
        Ok(())
    }
}

/// A generated `(A, b, c)` triple together with the spec that produced it.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub spec: GenSpec,
}

fn gaussian_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> DMatrix<f64> {
    // row-major fill order, part of the documented stream layout
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = rng.standard_normal();
        }
    }
    m
}

fn thin_q(g: DMatrix<f64>) -> DMatrix<f64> {
    let qr = g.qr();
    qr.q()
}

/// Build the matrix part of an instance, advancing `rng` past the U, V,
/// and D draws.
fn generate_matrix_with(spec: &GenSpec, rng: &mut SeededRng) -> Result<DenseMatrix, Error> {
    spec.validate()?;
    let u = thin_q(gaussian_matrix(rng, spec.m, spec.r));
    let v = thin_q(gaussian_matrix(rng, spec.n, spec.r));
    let d: Vec<f64> = (0..spec.r)
        .map(|_| 1.0 + (spec.kappa - 1.0) * rng.uniform())
        .collect();
    Ok(DenseMatrix::from_fn(spec.m, spec.n, |i, j| {
        (0..spec.r).map(|t| u[(i, t)] * d[t] * v[(j, t)]).sum()
    }))
}

/// Generate the matrix alone, from a stream seeded with `spec.seed`.
pub fn generate_matrix(spec: &GenSpec) -> Result<DenseMatrix, Error> {
    let mut rng = SeededRng::new(spec.seed);
    generate_matrix_with(spec, &mut rng)
}

/// Generate the right-hand sides for `a`, continuing the provided stream.
pub fn generate_rhs(
    a: &DenseMatrix,
    spec: &GenSpec,
    rng: &mut SeededRng,
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    spec.validate()?;
    let (m, n) = (a.nrows(), a.ncols());
    let b: Vec<f64> = (0..m).map(|_| rng.standard_normal()).collect();
    let c = if spec.consistent {
        let w: Vec<f64> = (0..m).map(|_| rng.standard_normal()).collect();
        a.transpose_matvec(&w)?
    } else {
        let mut g: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let h: Vec<f64> = (0..n - spec.r).map(|_| rng.standard_normal()).collect();
        let null_basis = SpectralData::new(a)?.null_space_basis();
        for j in 0..n {
            for (t, ht) in h.iter().enumerate() {
                g[j] += null_basis[(j, t)] * ht;
            }
        }
        g
    };
    Ok((b, c))
}

/// Generate a full instance from one stream seeded with `spec.seed`.
pub fn generate(spec: &GenSpec) -> Result<ProblemInstance, Error> {
    let mut rng = SeededRng::new(spec.seed);
    let a = generate_matrix_with(spec, &mut rng)?;
    let (b, c) = generate_rhs(&a, spec, &mut rng)?;
    Ok(ProblemInstance {
        a,
        b,
        c,
        spec: *spec,
    })
}

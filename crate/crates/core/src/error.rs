//! Error type shared by all solver-facing operations.

/// Errors surfaced by matrix construction, sampling, the oracle, the
/// solvers, and problem generation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Every sampling weight is zero, which means the matrix is zero and
    /// no row or column can ever be picked.
    #[error("all sampling weights are zero (zero matrix)")]
    AllWeightsZero,

    /// Spectral quantities (singular values, pseudoinverse, rho) are
    /// undefined for the zero matrix.
    #[error("matrix is zero; spectral quantities are undefined")]
    ZeroMatrix,

    /// Projection onto the hyperplane of row `i` requires a nonzero row.
    #[error("row {0} has zero norm; cannot project onto its hyperplane")]
    ZeroRow(usize),

    /// Projection along column `j` requires a nonzero column.
    #[error("column {0} has zero norm; cannot project along it")]
    ZeroColumn(usize),

    /// A vector length does not match the dimension required by the
    /// operation.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A right-hand side outside the row space was requested but the rank
    /// equals the column count, so the row space is all of R^n.
    #[error("rank equals column count; no vector outside the row space exists")]
    InconsistentImpossible,

    /// Problem-generation parameters violate their constraints.
    #[error("invalid generation parameters: {0}")]
    InvalidGenSpec(String),
}

impl Error {
    /// Stable machine-parseable category token, used by the CLI's
    /// one-line error reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::AllWeightsZero => "all-weights-zero",
            Error::ZeroMatrix => "zero-matrix",
            Error::ZeroRow(_) => "zero-row",
            Error::ZeroColumn(_) => "zero-column",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::InconsistentImpossible => "inconsistent-impossible",
            Error::InvalidGenSpec(_) => "invalid-gen-spec",
        }
    }
}

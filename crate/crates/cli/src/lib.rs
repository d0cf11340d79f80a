//! Library half of the `renk` command-line tool: Matrix Market IO, CSV
//! output, the multi-trial experiment harness, and problem loading shared
//! by the subcommands and the test suites.

use std::path::{Path, PathBuf};

use renk_core::oracle::{Consistency, ReferenceSolutions, SpectralData};
use renk_core::problemgen::{generate, GenSpec};
use renk_core::DenseMatrix;

pub mod csvio;
pub mod experiment;
pub mod mmio;

pub use experiment::{run_experiment, Algorithm, ExperimentConfig, ExperimentResult};

/// Format a double with 17 significant digits: enough for the printed text
/// to parse back to the identical bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Everything a subcommand can fail with, each mapped onto a stable
/// category token for the one-line error report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] renk_core::Error),
    #[error(transparent)]
    MatrixMarket(#[from] mmio::MmError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(
        "min(m, n) = {min_dim} exceeds the oracle cap {cap}; raise --oracle-cap \
         or use `solve`, which falls back to residual-only reporting"
    )]
    OracleCapExceeded { min_dim: usize, cap: usize },
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.category(),
            CliError::MatrixMarket(e) => e.category(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::OracleCapExceeded { .. } => "oracle-cap-exceeded",
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// A loaded problem: generated from a spec or read from files.
#[derive(Debug, Clone)]
pub struct Problem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub gen: Option<GenSpec>,
}

impl Problem {
    pub fn from_spec(spec: GenSpec) -> Result<Self, CliError> {
        let p = generate(&spec)?;
        Ok(Problem {
            a: p.a,
            b: p.b,
            c: p.c,
            gen: Some(spec),
        })
    }

    /// Read A from `matrix`, b from `b`, and c from `c` (zero when absent).
    pub fn from_files(matrix: &Path, b: &Path, c: Option<&PathBuf>) -> Result<Self, CliError> {
        let a = mmio::read_matrix_market(matrix)?;
        let b_vec = mmio::read_vector(b)?;
        if b_vec.len() != a.nrows() {
            return Err(CliError::Usage(format!(
                "b has length {} but A has {} rows",
                b_vec.len(),
                a.nrows()
            )));
        }
        let c_vec = match c {
            Some(path) => {
                let v = mmio::read_vector(path)?;
                if v.len() != a.ncols() {
                    return Err(CliError::Usage(format!(
                        "c has length {} but A has {} columns",
                        v.len(),
                        a.ncols()
                    )));
                }
                v
            }
            None => vec![0.0; a.ncols()],
        };
        Ok(Problem {
            a,
            b: b_vec,
            c: c_vec,
            gen: None,
        })
    }
}

/// Reference solutions plus the consistency classification, for the
/// experiment initial vectors `x0 = 0`, `z0 = b`, `y0 = c`.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub refs: ReferenceSolutions,
    pub consistency: Consistency,
}

/// Compute the oracle when the problem is small enough (`min(m, n) <= cap`,
/// the dense SVD budget); `Ok(None)` above the cap.
///
/// For [`Algorithm::Rk`] the references are those of the `c = 0` problem:
/// that iteration solves `A x = b` and ignores `c` entirely.
pub fn prepare_oracle(
    problem: &Problem,
    algorithm: Algorithm,
    cap: usize,
) -> Result<Option<Oracle>, CliError> {
    let a = &problem.a;
    if a.nrows().min(a.ncols()) > cap {
        return Ok(None);
    }
    let spectral = SpectralData::new(a)?;
    let consistency = spectral.classify_consistency(&problem.c);
    let zero_c;
    let c_for_refs: &[f64] = match algorithm {
        Algorithm::Rk => {
            zero_c = vec![0.0; a.ncols()];
            &zero_c
        }
        _ => &problem.c,
    };
    let x0 = vec![0.0; a.ncols()];
    let refs =
        ReferenceSolutions::compute(&spectral, &problem.b, c_for_refs, &x0, &problem.b, c_for_refs)?;
    Ok(Some(Oracle { refs, consistency }))
}

/// The warning text for an algorithm/consistency mismatch, if any.
pub fn consistency_warning(algorithm: Algorithm, consistency: Consistency) -> Option<String> {
    match (algorithm, consistency) {
        (Algorithm::Rdk, Consistency::Inconsistent) => Some(
            "algorithm rdk assumes c in ran(A^T), but this problem is inconsistent; \
             the convergence guarantee does not apply (consider rtk)"
                .to_string(),
        ),
        (Algorithm::Rtk, Consistency::Consistent) => Some(
            "algorithm rtk targets c outside ran(A^T), but this problem is consistent; \
             rdk converges with a smaller constant"
                .to_string(),
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips_doubles() {
        for v in [0.0, 1.0 / 3.0, -2.0 / 7.0, 1e-300, 6.02e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
    }

    #[test]
    fn rk_oracle_ignores_c() {
        let spec = GenSpec {
            m: 8,
            n: 5,
            r: 3,
            kappa: 1.5,
            seed: 2,
            consistent: true,
        };
        let problem = Problem::from_spec(spec).unwrap();
        let rk = prepare_oracle(&problem, Algorithm::Rk, 2000).unwrap().unwrap();
        let rdk = prepare_oracle(&problem, Algorithm::Rdk, 2000).unwrap().unwrap();
        // with c != 0 the two limits differ by (A^T A)+ c
        assert_ne!(rk.refs.x_star, rdk.refs.x_star);
    }

    #[test]
    fn oracle_cap_skips_computation() {
        let spec = GenSpec {
            m: 8,
            n: 5,
            r: 3,
            kappa: 1.5,
            seed: 2,
            consistent: true,
        };
        let problem = Problem::from_spec(spec).unwrap();
        assert!(prepare_oracle(&problem, Algorithm::Rdk, 4).unwrap().is_none());
    }

    #[test]
    fn warnings_fire_on_mismatch_only() {
        assert!(consistency_warning(Algorithm::Rdk, Consistency::Inconsistent).is_some());
        assert!(consistency_warning(Algorithm::Rtk, Consistency::Consistent).is_some());
        assert!(consistency_warning(Algorithm::Rdk, Consistency::Consistent).is_none());
        assert!(consistency_warning(Algorithm::Rtk, Consistency::Inconsistent).is_none());
        assert!(consistency_warning(Algorithm::Rk, Consistency::Inconsistent).is_none());
    }
}

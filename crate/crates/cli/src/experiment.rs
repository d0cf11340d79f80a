//! Multi-trial experiment harness: run one solver many times on a fixed
//! problem, average the squared-error curves, and attach the matching
//! theorem bound.
//!
//! Trial `t` seeds its generator with `base_seed + t`, so every trial is
//! independently replayable. Trials may execute in parallel; the mean
//! reduction always iterates trials in index order, which keeps the
//! floating-point sums (and therefore the output files) identical across
//! runs and across thread counts.

use std::time::Duration;

use rayon::prelude::*;

use renk_core::oracle::Consistency;
use renk_core::solvers::{rdk_run, rk_run, rtk_run, ConvergenceTrace, RunConfig};
use renk_core::{DenseMatrix, Error, GenSpec, ReferenceSolutions};

/// Which iteration to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Single randomized Kaczmarz on `A x = b` (ignores c).
    Rk,
    /// Double iteration for the extended normal equations, consistent case.
    Rdk,
    /// Triple iteration for the extended normal equations, inconsistent case.
    Rtk,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Rk => "rk",
            Algorithm::Rdk => "rdk",
            Algorithm::Rtk => "rtk",
        })
    }
}

/// Trial count, iteration budget, seeding, and tracking cadence.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub iters: usize,
    pub base_seed: u64,
    pub track_stride: usize,
}

/// Problem provenance recorded alongside the curves.
#[derive(Debug, Clone)]
pub struct ExperimentMeta {
    pub m: usize,
    pub n: usize,
    /// Present when the problem was generated rather than read from files.
    pub gen: Option<GenSpec>,
    pub consistency: Option<Consistency>,
    pub rho: f64,
    pub frob_sq: f64,
    pub gap_x_sq: f64,
    pub gap_z_sq: f64,
    pub gap_y_sq: f64,
    /// Wall time of the trial loop. Informational only; never written to
    /// output files, which must be byte-identical across runs.
    pub wall: Duration,
}

/// Mean squared-error curve across trials plus the bound curve.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub meta: ExperimentMeta,
    pub tracked_iterations: Vec<usize>,
    pub mean_sq_error: Vec<f64>,
    pub bound: Option<Vec<f64>>,
}

/// Run one trial with the experiment initial vectors `y0 = c`, `z0 = b`,
/// `x0 = 0`.
pub fn run_trial(
    algorithm: Algorithm,
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    cfg: &RunConfig,
    refs: Option<&ReferenceSolutions>,
) -> Result<(Vec<f64>, ConvergenceTrace), Error> {
    let x0 = vec![0.0; a.ncols()];
    match algorithm {
        Algorithm::Rk => {
            let (state, trace) = rk_run(a, b, &x0, cfg, refs)?;
            Ok((state.x, trace))
        }
        Algorithm::Rdk => {
            let (state, trace) = rdk_run(a, b, c, b, &x0, cfg, refs)?;
            Ok((state.x, trace))
        }
        Algorithm::Rtk => {
            let (state, trace) = rtk_run(a, b, c, c, b, &x0, cfg, refs)?;
            Ok((state.x, trace))
        }
    }
}

/// Run `cfg.trials` independent trials and average the error curves.
///
/// `refs` must have been computed with the same initial vectors the trials
/// use (`x0 = 0`, `z0 = b`, `y0 = c`; for [`Algorithm::Rk`] pass the
/// references of the `c = 0` problem, since that iteration ignores `c`).
pub fn run_experiment(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    refs: &ReferenceSolutions,
    cfg: &ExperimentConfig,
    meta_gen: Option<GenSpec>,
    consistency: Option<Consistency>,
) -> Result<ExperimentResult, Error> {
    assert!(cfg.trials >= 1, "need at least one trial");
    let started = std::time::Instant::now();

    let traces: Vec<ConvergenceTrace> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let run_cfg = RunConfig::new(cfg.iters, cfg.base_seed + t as u64)
                .with_track_stride(cfg.track_stride);
            run_trial(cfg.algorithm, a, b, c, &run_cfg, Some(refs)).map(|(_, trace)| trace)
        })
        .collect::<Result<_, _>>()?;

    let tracked = traces[0].tracked_iterations.clone();
    let mut mean = vec![0.0; tracked.len()];
    for trace in &traces {
        debug_assert_eq!(trace.tracked_iterations, tracked);
        for (acc, e) in mean.iter_mut().zip(&trace.sq_error) {
            *acc += e;
        }
    }
    let scale = 1.0 / cfg.trials as f64;
    for v in &mut mean {
        *v *= scale;
    }
    let bound = traces[0].bound.clone();

    Ok(ExperimentResult {
        config: cfg.clone(),
        meta: ExperimentMeta {
            m: a.nrows(),
            n: a.ncols(),
            gen: meta_gen,
            consistency,
            rho: refs.rho,
            frob_sq: refs.frob_sq,
            gap_x_sq: refs.norm_sq_x0_gap,
            gap_z_sq: refs.norm_sq_z0_gap,
            gap_y_sq: refs.norm_sq_y0_gap,
            wall: started.elapsed(),
        },
        tracked_iterations: tracked,
        mean_sq_error: mean,
        bound: Some(bound.expect("refs supplied, bound always present")),
    })
}

/// The iterations a run with this budget and stride records: 0, every
/// stride-th, and the final one.
pub fn tracked_iterations(iters: usize, stride: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..=iters).step_by(stride.max(1)).collect();
    if *out.last().unwrap() != iters {
        out.push(iters);
    }
    out
}

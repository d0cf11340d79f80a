//! Randomized Kaczmarz iterations for `A x = b` and for the extended
//! normal equations `A^T A x = A^T b - c`.
//!
//! Three run loops are provided, all sampling rows/columns with probability
//! proportional to their squared norms:
//!
//! * [`rk_run`] — single iteration: project x onto a random row hyperplane
//!   of `A x = b`.
//! * [`rdk_run`] — double iteration for consistent `c` (c in the row
//!   space): a column step drives `z` toward the solution of
//!   `A^T z = c` started inside `b + ran(A)`, and a row step drives `x`
//!   using `b_i - z_i` as the right-hand side.
//! * [`rtk_run`] — triple iteration for inconsistent `c`: a row step
//!   drives `y` toward the row-space-orthogonal part of `c` (RK on
//!   `A y = 0` started at `y0 = c`), a column step drives `z` with
//!   `c_j - y_j`, and a row step drives `x` with `b_i - z_i`.
//!
//! Every iteration touches one row and/or one column only; the full-matrix
//! products live in the oracle and the optional residual stop, never here.
//!
//! Each run owns its state and generator exclusively. Indices come from a
//! single per-run stream in the fixed order (y-row, z-column, x-row), so a
//! run is replayable from `(problem, algorithm, seed)`.

use crate::error::Error;
use crate::matrix::{check_len, DenseMatrix};
use crate::oracle::{bound_rdk, bound_rk, bound_rtk, ReferenceSolutions};
use crate::sampling::{SeededRng, WeightedSampler};

/// Final state of an [`rk_run`].
#[derive(Debug, Clone)]
pub struct RkState {
    pub x: Vec<f64>,
}

/// Final state of an [`rdk_run`].
#[derive(Debug, Clone)]
pub struct RdkState {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
}

/// Final state of an [`rtk_run`]. The auxiliary iterate `y` lives in R^n:
/// it starts at `y0` in `c + ran(A^T)` and every update subtracts a
/// multiple of a row of `A`.
#[derive(Debug, Clone)]
pub struct RtkState {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
}

/// Squared error `|x^k - x_star|^2` and the matching theorem bound at each
/// tracked iteration. Filled only when the run is given reference
/// solutions; `iterations_run` is recorded either way.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTrace {
    pub tracked_iterations: Vec<usize>,
    pub sq_error: Vec<f64>,
    pub bound: Option<Vec<f64>>,
    pub iterations_run: usize,
}

/// Optional practical stopping rule: every `check_every` iterations
/// evaluate the full residual `|A^T (A x - b) + c|` and stop once it drops
/// to `tol` or below. Each check costs two full passes over the matrix, so
/// this is strictly opt-in; the default stopping rule is the fixed
/// iteration budget.
#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    pub check_every: usize,
    pub tol: f64,
}

/// Iteration budget, seed, tracking cadence, and optional residual stop.
///
/// Tracking records iteration 0, every `track_stride`-th iteration, and the
/// final iteration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub iters: usize,
    pub seed: u64,
    pub track_stride: usize,
    pub stop: Option<StopRule>,
}

impl RunConfig {
    pub fn new(iters: usize, seed: u64) -> Self {
        RunConfig {
            iters,
            seed,
            track_stride: 1,
            stop: None,
        }
    }

    pub fn with_track_stride(mut self, stride: usize) -> Self {
        assert!(stride >= 1, "track stride must be at least 1");
        self.track_stride = stride;
        self
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = Some(stop);
        self
    }
}

/// Project `x` onto the hyperplane `{v : A[i,:] v = rhs_i}`. The returned
/// vector satisfies the equation to round-off and differs from `x` by a
/// multiple of the row.
pub fn row_project(a: &DenseMatrix, rhs_i: f64, x: &[f64], i: usize) -> Result<Vec<f64>, Error> {
    check_len("row_project x", a.ncols(), x.len())?;
    if a.squared_row_norms()[i] <= 0.0 {
        return Err(Error::ZeroRow(i));
    }
    let mut out = x.to_vec();
    row_project_in_place(a, rhs_i, &mut out, i);
    Ok(out)
}

/// Project `z` onto the hyperplane `{w : A[:,j]^T w = rhs_j}`.
pub fn col_project(a: &DenseMatrix, rhs_j: f64, z: &[f64], j: usize) -> Result<Vec<f64>, Error> {
    check_len("col_project z", a.nrows(), z.len())?;
    if a.squared_col_norms()[j] <= 0.0 {
        return Err(Error::ZeroColumn(j));
    }
    let mut out = z.to_vec();
    col_project_in_place(a, rhs_j, &mut out, j);
    Ok(out)
}

// In-place hot-path variants. The samplers never yield zero-norm indices,
// so the callers below skip the norm check.
#[inline]
fn row_project_in_place(a: &DenseMatrix, rhs_i: f64, x: &mut [f64], i: usize) {
    let coef = (a.row_dot(i, x) - rhs_i) / a.squared_row_norms()[i];
    let row = a.row(i);
    for j in 0..x.len() {
        x[j] -= coef * row[j];
    }
}

#[inline]
fn col_project_in_place(a: &DenseMatrix, rhs_j: f64, z: &mut [f64], j: usize) {
    let coef = (a.col_dot(j, z) - rhs_j) / a.squared_col_norms()[j];
    let n = a.ncols();
    let entries = a.entries();
    for i in 0..z.len() {
        z[i] -= coef * entries[i * n + j];
    }
}

enum BoundKind {
    Rk,
    Rdk,
    Rtk,
}

/// Shared tracking plumbing for the three run loops.
struct Tracker<'a> {
    refs: Option<&'a ReferenceSolutions>,
    kind: BoundKind,
    stride: usize,
    trace: ConvergenceTrace,
}

impl<'a> Tracker<'a> {
    fn new(refs: Option<&'a ReferenceSolutions>, kind: BoundKind, stride: usize) -> Self {
        let trace = ConvergenceTrace {
            bound: refs.map(|_| Vec::new()),
            ..Default::default()
        };
        Tracker {
            refs,
            kind,
            stride,
            trace,
        }
    }

    fn record(&mut self, k: usize, x: &[f64]) {
        let Some(refs) = self.refs else { return };
        if self.trace.tracked_iterations.last() == Some(&k) {
            return;
        }
        self.trace.tracked_iterations.push(k);
        self.trace.sq_error.push(refs.sq_error(x));
        let bound = match self.kind {
            BoundKind::Rk => bound_rk(k, refs.rho, refs.norm_sq_x0_gap),
            BoundKind::Rdk => bound_rdk(
                k,
                refs.rho,
                refs.frob_sq,
                refs.norm_sq_z0_gap,
                refs.norm_sq_x0_gap,
            ),
            BoundKind::Rtk => bound_rtk(
                k,
                refs.rho,
                refs.frob_sq,
                refs.norm_sq_y0_gap,
                refs.norm_sq_z0_gap,
                refs.norm_sq_x0_gap,
            ),
        };
        self.trace.bound.as_mut().expect("bound vec present").push(bound);
    }

    fn should_record(&self, k: usize) -> bool {
        k.is_multiple_of(self.stride)
    }

    fn finish(mut self, final_k: usize, x: &[f64]) -> ConvergenceTrace {
        self.record(final_k, x);
        self.trace.iterations_run = final_k;
        self.trace
    }
}

/// Residual `|A^T (A x - b) + c|` of the extended normal equations; used
/// by the optional stop rule. Two full matrix passes.
pub fn extended_residual_norm(a: &DenseMatrix, b: &[f64], c: Option<&[f64]>, x: &[f64]) -> f64 {
    let ax = a.matvec(x).expect("x has length n");
    let r: Vec<f64> = ax.iter().zip(b).map(|(axi, bi)| axi - bi).collect();
    let mut atr = a.transpose_matvec(&r).expect("r has length m");
    if let Some(c) = c {
        for (t, ci) in atr.iter_mut().zip(c) {
            *t += ci;
        }
    }
    crate::matrix::norm(&atr)
}

fn should_stop(
    stop: &Option<StopRule>,
    k: usize,
    a: &DenseMatrix,
    b: &[f64],
    c: Option<&[f64]>,
    x: &[f64],
) -> bool {
    match stop {
        Some(rule) if rule.check_every > 0 && k.is_multiple_of(rule.check_every) => {
            extended_residual_norm(a, b, c, x) <= rule.tol
        }
        _ => false,
    }
}

/// Run RK on `A x = b` for `cfg.iters` iterations from `x0`.
pub fn rk_run(
    a: &DenseMatrix,
    b: &[f64],
    x0: &[f64],
    cfg: &RunConfig,
    refs: Option<&ReferenceSolutions>,
) -> Result<(RkState, ConvergenceTrace), Error> {
    check_len("rk_run b", a.nrows(), b.len())?;
    check_len("rk_run x0", a.ncols(), x0.len())?;
    let rows = WeightedSampler::from_weights(a.squared_row_norms())?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut x = x0.to_vec();
    let mut tracker = Tracker::new(refs, BoundKind::Rk, cfg.track_stride);
    tracker.record(0, &x);
    let mut last_k = 0;
    for k in 1..=cfg.iters {
        let i = rows.sample(&mut rng);
        row_project_in_place(a, b[i], &mut x, i);
        if tracker.should_record(k) {
            tracker.record(k, &x);
        }
        last_k = k;
        if should_stop(&cfg.stop, k, a, b, None, &x) {
            break;
        }
    }
    Ok((RkState { x: x.clone() }, tracker.finish(last_k, &x)))
}

/// Run RDK on `A^T A x = A^T b - c` for `cfg.iters` iterations.
///
/// `z0` must lie in `b + ran(A)` for the convergence theory to apply; the
/// usual choice is `z0 = b`. Consistency of `c` is not enforced here — the
/// caller may surface a warning when an oracle says `c` is outside the row
/// space.
pub fn rdk_run(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    z0: &[f64],
    x0: &[f64],
    cfg: &RunConfig,
    refs: Option<&ReferenceSolutions>,
) -> Result<(RdkState, ConvergenceTrace), Error> {
    check_len("rdk_run b", a.nrows(), b.len())?;
    check_len("rdk_run c", a.ncols(), c.len())?;
    check_len("rdk_run z0", a.nrows(), z0.len())?;
    check_len("rdk_run x0", a.ncols(), x0.len())?;
    let rows = WeightedSampler::from_weights(a.squared_row_norms())?;
    let cols = WeightedSampler::from_weights(a.squared_col_norms())?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut z = z0.to_vec();
    let mut x = x0.to_vec();
    let mut tracker = Tracker::new(refs, BoundKind::Rdk, cfg.track_stride);
    tracker.record(0, &x);
    let mut last_k = 0;
    for k in 1..=cfg.iters {
        let j = cols.sample(&mut rng);
        col_project_in_place(a, c[j], &mut z, j);
        let i = rows.sample(&mut rng);
        row_project_in_place(a, b[i] - z[i], &mut x, i);
        if tracker.should_record(k) {
            tracker.record(k, &x);
        }
        last_k = k;
        if should_stop(&cfg.stop, k, a, b, Some(c), &x) {
            break;
        }
    }
    Ok((
        RdkState {
            z,
            x: x.clone(),
        },
        tracker.finish(last_k, &x),
    ))
}

/// Run RTK on `A^T A x = A^T b - c` for `cfg.iters` iterations.
///
/// Defaults from the experiment setup are `y0 = c`, `z0 = b`, `x0 = 0`;
/// any `y0` in `c + ran(A^T)` and `z0` in `b + ran(A)` are admissible.
#[allow(clippy::too_many_arguments)] // mirrors the operation contract
pub fn rtk_run(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    y0: &[f64],
    z0: &[f64],
    x0: &[f64],
    cfg: &RunConfig,
    refs: Option<&ReferenceSolutions>,
) -> Result<(RtkState, ConvergenceTrace), Error> {
    check_len("rtk_run b", a.nrows(), b.len())?;
    check_len("rtk_run c", a.ncols(), c.len())?;
    check_len("rtk_run y0", a.ncols(), y0.len())?;
    check_len("rtk_run z0", a.nrows(), z0.len())?;
    check_len("rtk_run x0", a.ncols(), x0.len())?;
    let rows = WeightedSampler::from_weights(a.squared_row_norms())?;
    let cols = WeightedSampler::from_weights(a.squared_col_norms())?;
    let mut rng = SeededRng::new(cfg.seed);
    let mut y = y0.to_vec();
    let mut z = z0.to_vec();
    let mut x = x0.to_vec();
    let mut tracker = Tracker::new(refs, BoundKind::Rtk, cfg.track_stride);
    tracker.record(0, &x);
    let mut last_k = 0;
    for k in 1..=cfg.iters {
        let l = rows.sample(&mut rng);
        row_project_in_place(a, 0.0, &mut y, l);
        let j = cols.sample(&mut rng);
        col_project_in_place(a, c[j] - y[j], &mut z, j);
        let i = rows.sample(&mut rng);
        row_project_in_place(a, b[i] - z[i], &mut x, i);
        if tracker.should_record(k) {
            tracker.record(k, &x);
        }
        last_k = k;
        if should_stop(&cfg.stop, k, a, b, Some(c), &x) {
            break;
        }
    }
    Ok((
        RtkState {
            y,
            z,
            x: x.clone(),
        },
        tracker.finish(last_k, &x),
    ))
}

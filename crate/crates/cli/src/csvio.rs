//! CSV output for experiment and bound curves.
//!
//! Layout: `#`-prefixed metadata comment lines, then a header row, then one
//! data row per tracked iteration. Floating-point values carry 17
//! significant digits so parsing them back reproduces the exact doubles.
//! Nothing time- or environment-dependent is written: the same
//! configuration and seed produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use renk_core::oracle::Consistency;

use crate::experiment::{ExperimentMeta, ExperimentResult};
use crate::fmt_f64;

fn open(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_meta(
    w: &mut impl Write,
    algorithm: &str,
    meta: &ExperimentMeta,
    run: Option<(usize, usize, u64, usize)>,
) -> std::io::Result<()> {
    writeln!(w, "# algorithm: {algorithm}")?;
    writeln!(w, "# m: {}", meta.m)?;
    writeln!(w, "# n: {}", meta.n)?;
    if let Some(gen) = &meta.gen {
        writeln!(w, "# gen_rank: {}", gen.r)?;
        writeln!(w, "# gen_kappa: {}", fmt_f64(gen.kappa))?;
        writeln!(w, "# gen_consistent: {}", gen.consistent)?;
        writeln!(w, "# gen_seed: {}", gen.seed)?;
    }
    if let Some(consistency) = meta.consistency {
        let label = match consistency {
            Consistency::Consistent => "consistent",
            Consistency::Inconsistent => "inconsistent",
        };
        writeln!(w, "# consistency: {label}")?;
    }
    if let Some((trials, iters, base_seed, stride)) = run {
        writeln!(w, "# trials: {trials}")?;
        writeln!(w, "# iters: {iters}")?;
        writeln!(w, "# base_seed: {base_seed}")?;
        writeln!(w, "# track_stride: {stride}")?;
    }
    writeln!(w, "# rho: {}", fmt_f64(meta.rho))?;
    writeln!(w, "# frob_sq: {}", fmt_f64(meta.frob_sq))?;
    writeln!(w, "# gap_x_sq: {}", fmt_f64(meta.gap_x_sq))?;
    writeln!(w, "# gap_z_sq: {}", fmt_f64(meta.gap_z_sq))?;
    writeln!(w, "# gap_y_sq: {}", fmt_f64(meta.gap_y_sq))?;
    Ok(())
}

/// Write a mean-error curve, with the bound column when present.
pub fn write_experiment_csv(result: &ExperimentResult, path: &Path) -> std::io::Result<()> {
    let mut w = open(path)?;
    let cfg = &result.config;
    write_meta(
        &mut w,
        &cfg.algorithm.to_string(),
        &result.meta,
        Some((cfg.trials, cfg.iters, cfg.base_seed, cfg.track_stride)),
    )?;
    match &result.bound {
        Some(bounds) => {
            writeln!(w, "k,mean_sq_error,bound")?;
            for ((k, err), bound) in result
                .tracked_iterations
                .iter()
                .zip(&result.mean_sq_error)
                .zip(bounds)
            {
                writeln!(w, "{k},{},{}", fmt_f64(*err), fmt_f64(*bound))?;
            }
        }
        None => {
            writeln!(w, "k,mean_sq_error")?;
            for (k, err) in result.tracked_iterations.iter().zip(&result.mean_sq_error) {
                writeln!(w, "{k},{}", fmt_f64(*err))?;
            }
        }
    }
    w.flush()
}

/// Write a bound curve alone.
pub fn write_bounds_csv(
    algorithm: &str,
    meta: &ExperimentMeta,
    tracked: &[usize],
    bounds: &[f64],
    path: &Path,
) -> std::io::Result<()> {
    let mut w = open(path)?;
    write_meta(&mut w, algorithm, meta, None)?;
    writeln!(w, "k,bound")?;
    for (k, bound) in tracked.iter().zip(bounds) {
        writeln!(w, "{k},{}", fmt_f64(*bound))?;
    }
    w.flush()
}

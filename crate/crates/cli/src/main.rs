//! `renk` — generate extended-normal-equations problems, run the
//! randomized Kaczmarz solvers on them, and export convergence curves.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use renk_cli::experiment::{run_trial, tracked_iterations, ExperimentMeta};
use renk_cli::{
    consistency_warning, csvio, fmt_f64, mmio, prepare_oracle, run_experiment, Algorithm,
    CliError, ExperimentConfig, Oracle, Problem,
};
use renk_core::oracle::{bound_rdk, bound_rk, bound_rtk, Consistency};
use renk_core::problemgen::GenSpec;
use renk_core::solvers::{extended_residual_norm, RunConfig, StopRule};

#[derive(Parser)]
#[command(
    name = "renk",
    version,
    about = "Randomized single/double/triple Kaczmarz solvers for A^T A x = A^T b - c"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic problem and write A, b, c as Matrix Market files
    Generate(GenerateArgs),
    /// Run one solver once; report residuals and optionally write the final x
    Solve(SolveArgs),
    /// Average many seeded trials and write the mean error curve with its bound
    Experiment(ExperimentArgs),
    /// Write the theorem bound curve for a problem without running any trials
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Row count of A
    #[arg(long)]
    m: usize,
    /// Column count of A
    #[arg(long)]
    n: usize,
    /// Rank of A (at most min(m, n))
    #[arg(long)]
    rank: usize,
    /// Condition-number bound; nonzero singular values are drawn from [1, kappa]
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Put c inside the row space of A (an exact solution exists) [default]
    #[arg(long, conflicts_with = "inconsistent")]
    consistent: bool,
    /// Give c a component outside the row space of A
    #[arg(long)]
    inconsistent: bool,
    /// Generation seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing); writes A.mtx, b.mtx, c.mtx
    #[arg(long)]
    out: PathBuf,
}

/// Problem source shared by solve/experiment/bounds: either a generation
/// spec (--m/--n/--rank/...) or files (--matrix/--b/--c).
#[derive(Args)]
struct ProblemArgs {
    /// Row count of a generated A
    #[arg(long, conflicts_with = "matrix")]
    m: Option<usize>,
    /// Column count of a generated A
    #[arg(long, conflicts_with = "matrix")]
    n: Option<usize>,
    /// Rank of a generated A
    #[arg(long, conflicts_with = "matrix")]
    rank: Option<usize>,
    /// Condition-number bound of a generated A
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Generate c inside the row space [default]
    #[arg(long, conflicts_with = "inconsistent")]
    consistent: bool,
    /// Generate c with a component outside the row space
    #[arg(long)]
    inconsistent: bool,
    /// Seed of the generated problem (independent of the solver seed)
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,
    /// Matrix Market file for A (file mode)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Right-hand side b: Matrix Market vector or plain text (file mode)
    #[arg(long)]
    b: Option<PathBuf>,
    /// Offset vector c (file mode; zero when omitted)
    #[arg(long)]
    c: Option<PathBuf>,
    /// Compute the SVD oracle (error metric, bounds) only when min(m, n)
    /// is at most this
    #[arg(long, default_value_t = 2000)]
    oracle_cap: usize,
}

impl ProblemArgs {
    fn load(&self) -> Result<Problem, CliError> {
        if let Some(matrix) = &self.matrix {
            let b = self.b.as_ref().ok_or_else(|| {
                CliError::Usage("file mode needs --b alongside --matrix".into())
            })?;
            return Problem::from_files(matrix, b, self.c.as_ref());
        }
        if self.b.is_some() || self.c.is_some() {
            return Err(CliError::Usage(
                "--b/--c belong to file mode; pass --matrix as well".into(),
            ));
        }
        match (self.m, self.n, self.rank) {
            (Some(m), Some(n), Some(rank)) => Problem::from_spec(GenSpec {
                m,
                n,
                r: rank,
                kappa: self.kappa,
                seed: self.gen_seed,
                consistent: !self.inconsistent,
            }),
            _ => Err(CliError::Usage(
                "specify a problem: either --m --n --rank [--kappa --inconsistent --gen-seed] \
                 or --matrix --b [--c]"
                    .into(),
            )),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Which iteration to run
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Iteration budget
    #[arg(long)]
    iters: usize,
    /// Solver seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluate the full residual every this many iterations and stop at
    /// --tol (costs two matrix passes per check; 0 = never)
    #[arg(long, default_value_t = 0)]
    check_every: usize,
    /// Residual threshold for --check-every
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the final x as a Matrix Market vector
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Which iteration to run
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Number of independent trials to average
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Iteration budget per trial
    #[arg(long)]
    iters: usize,
    /// Base seed; trial t runs with seed base + t
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record the error every this many iterations
    #[arg(long, default_value_t = 1)]
    track_stride: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    /// Which bound to evaluate
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Largest iteration to evaluate the bound at
    #[arg(long)]
    iters: usize,
    /// Evaluate every this many iterations
    #[arg(long, default_value_t = 1)]
    track_stride: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}

fn describe_problem(problem: &Problem) -> String {
    match &problem.gen {
        Some(gen) => format!(
            "{}x{} generated (rank {}, kappa {}, {}, seed {})",
            gen.m,
            gen.n,
            gen.r,
            gen.kappa,
            if gen.consistent { "consistent" } else { "inconsistent" },
            gen.seed
        ),
        None => format!("{}x{} from files", problem.a.nrows(), problem.a.ncols()),
    }
}

fn warn_on_mismatch(algorithm: Algorithm, oracle: Option<&Oracle>) {
    if let Some(oracle) = oracle {
        if let Some(text) = consistency_warning(algorithm, oracle.consistency) {
            eprintln!("warning: {text}");
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let spec = GenSpec {
        m: args.m,
        n: args.n,
        r: args.rank,
        kappa: args.kappa,
        seed: args.seed,
        consistent: !args.inconsistent,
    };
    let problem = Problem::from_spec(spec)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let a_path = args.out.join("A.mtx");
    let b_path = args.out.join("b.mtx");
    let c_path = args.out.join("c.mtx");
    mmio::write_matrix_market(&a_path, &problem.a)?;
    mmio::write_vector(&b_path, &problem.b)?;
    mmio::write_vector(&c_path, &problem.c)?;
    println!("problem: {}", describe_problem(&problem));
    println!("wrote {}", a_path.display());
    println!("wrote {}", b_path.display());
    println!("wrote {}", c_path.display());
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let problem = args.problem.load()?;
    let oracle = prepare_oracle(&problem, args.algorithm, args.problem.oracle_cap)?;
    warn_on_mismatch(args.algorithm, oracle.as_ref());

    let mut cfg = RunConfig::new(args.iters, args.seed).with_track_stride(args.iters.max(1));
    if args.check_every > 0 {
        cfg = cfg.with_stop(StopRule {
            check_every: args.check_every,
            tol: args.tol,
        });
    }
    let refs = oracle.as_ref().map(|o| &o.refs);
    let (x, trace) = run_trial(args.algorithm, &problem.a, &problem.b, &problem.c, &cfg, refs)?;

    println!("problem: {}", describe_problem(&problem));
    if let Some(oracle) = &oracle {
        let label = match oracle.consistency {
            Consistency::Consistent => "consistent",
            Consistency::Inconsistent => "inconsistent",
        };
        println!("consistency: {label}");
        println!("rho: {}", fmt_f64(oracle.refs.rho));
    }
    println!("iterations: {}", trace.iterations_run);
    let c_eff: Option<&[f64]> = match args.algorithm {
        Algorithm::Rk => None,
        _ => Some(&problem.c),
    };
    let residual = extended_residual_norm(&problem.a, &problem.b, c_eff, &x);
    println!("final residual |A^T (A x - b) + c|: {:.6e}", residual);
    if let Some(oracle) = &oracle {
        println!(
            "final squared error |x - x_star|^2: {:.6e}",
            oracle.refs.sq_error(&x)
        );
    }
    if let Some(out) = &args.out {
        mmio::write_vector(out, &x)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), CliError> {
    if args.trials == 0 || args.iters == 0 {
        return Err(CliError::Usage(
            "--trials and --iters must be at least 1".into(),
        ));
    }
    let problem = args.problem.load()?;
    let oracle = prepare_oracle(&problem, args.algorithm, args.problem.oracle_cap)?.ok_or(
        CliError::OracleCapExceeded {
            min_dim: problem.a.nrows().min(problem.a.ncols()),
            cap: args.problem.oracle_cap,
        },
    )?;
    warn_on_mismatch(args.algorithm, Some(&oracle));

    let cfg = ExperimentConfig {
        algorithm: args.algorithm,
        trials: args.trials,
        iters: args.iters,
        base_seed: args.seed,
        track_stride: args.track_stride,
    };
    let result = run_experiment(
        &problem.a,
        &problem.b,
        &problem.c,
        &oracle.refs,
        &cfg,
        problem.gen,
        Some(oracle.consistency),
    )?;
    csvio::write_experiment_csv(&result, &args.out).map_err(|e| CliError::io(&args.out, e))?;
    println!("problem: {}", describe_problem(&problem));
    println!("rho: {}", fmt_f64(result.meta.rho));
    println!(
        "mean final error: {:.6e} (bound {:.6e})",
        result.mean_sq_error.last().unwrap(),
        result.bound.as_ref().unwrap().last().unwrap()
    );
    println!(
        "wrote {} ({} tracked iterations, {} trials, {:.2?})",
        args.out.display(),
        result.tracked_iterations.len(),
        args.trials,
        result.meta.wall
    );
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<(), CliError> {
    let problem = args.problem.load()?;
    let oracle = prepare_oracle(&problem, args.algorithm, args.problem.oracle_cap)?.ok_or(
        CliError::OracleCapExceeded {
            min_dim: problem.a.nrows().min(problem.a.ncols()),
            cap: args.problem.oracle_cap,
        },
    )?;
    let refs = &oracle.refs;
    let tracked = tracked_iterations(args.iters, args.track_stride);
    let bounds: Vec<f64> = tracked
        .iter()
        .map(|&k| match args.algorithm {
            Algorithm::Rk => bound_rk(k, refs.rho, refs.norm_sq_x0_gap),
            Algorithm::Rdk => bound_rdk(
                k,
                refs.rho,
                refs.frob_sq,
                refs.norm_sq_z0_gap,
                refs.norm_sq_x0_gap,
            ),
            Algorithm::Rtk => bound_rtk(
                k,
                refs.rho,
                refs.frob_sq,
                refs.norm_sq_y0_gap,
                refs.norm_sq_z0_gap,
                refs.norm_sq_x0_gap,
            ),
        })
        .collect();
    let meta = ExperimentMeta {
        m: problem.a.nrows(),
        n: problem.a.ncols(),
        gen: problem.gen,
        consistency: Some(oracle.consistency),
        rho: refs.rho,
        frob_sq: refs.frob_sq,
        gap_x_sq: refs.norm_sq_x0_gap,
        gap_z_sq: refs.norm_sq_z0_gap,
        gap_y_sq: refs.norm_sq_y0_gap,
        wall: std::time::Duration::ZERO,
    };
    csvio::write_bounds_csv(&args.algorithm.to_string(), &meta, &tracked, &bounds, &args.out)
        .map_err(|e| CliError::io(&args.out, e))?;
    println!("wrote {} ({} evaluations)", args.out.display(), tracked.len());
    Ok(())
}

use std::io::Write;
use std::time::Duration;

use blockkrylov::io::{load_block_vector, load_matrix_market};
use blockkrylov::solver::KernelTimings;
use blockkrylov::{
    bcg_solve, poisson2d, random_block_rhs, BlockVector, CoefficientField, PoissonSpec,
    Preconditioner, SolveOptions, SolveReport, SolveStatus, SparseMatrix, SubalgebraConfig,
};

use crate::args::SolveArgs;
use crate::record::{writer, RunRecord};
use crate::{exit, CmdResult, Failure};

const DEFAULT_K: usize = 8;

struct Operator {
    a: SparseMatrix,
    grid: Option<(usize, usize)>,
}

fn operator(args: &SolveArgs) -> Result<Operator, Failure> {
    if let Some(path) = &args.matrix_file {
        let a = load_matrix_market(path)
            .map_err(|e| Failure::from(e).prefixed(&format!("{}: ", path.display())))?;
        return Ok(Operator { a, grid: None });
    }
    let coeff = CoefficientField::LogUniform {
        contrast: args.contrast,
    };
    let spec = PoissonSpec::new(args.nx, args.ny, coeff, args.seed)?;
    Ok(Operator {
        a: poisson2d(&spec)?,
        grid: Some((args.nx, args.ny)),
    })
}

/// Right-hand side batches, each n×k.
fn batches(args: &SolveArgs, n: usize) -> Result<Vec<BlockVector>, Failure> {
    if let Some(path) = &args.rhs_file {
        let b = load_block_vector(path)
            .map_err(|e| Failure::from(e).prefixed(&format!("{}: ", path.display())))?;
        if b.n() != n {
            return Err(Failure::with_code(
                exit::DATA,
                format!(
                    "{} has {} rows, the operator has n = {n}",
                    path.display(),
                    b.n()
                ),
            ));
        }
        if let Some(k) = args.k.filter(|&k| k != b.k()) {
            return Err(Failure::usage(format!(
                "--k {k} disagrees with the {} columns of {}",
                b.k(),
                path.display()
            )));
        }
        return Ok(vec![b]);
    }
    let k = args.k.unwrap_or(DEFAULT_K);
    if k == 0 {
        return Err(Failure::usage("--k must be positive"));
    }
    let count = match (args.repetitions, args.total_rhs) {
        (Some(r), _) => r,
        (None, Some(total)) if total % k == 0 => total / k,
        (None, Some(total)) => {
            return Err(Failure::usage(format!(
                "--total-rhs {total} is not a multiple of k = {k}"
            )))
        }
        (None, None) => 1,
    };
    if count == 0 {
        return Err(Failure::usage("at least one batch is required"));
    }
    Ok((0..count)
        .map(|b| random_block_rhs(n, k, args.seed.wrapping_add(b as u64)))
        .collect())
}

fn median(mut v: Vec<Duration>) -> f64 {
    v.sort();
    v[v.len() / 2].as_secs_f64()
}

/// Runs `reps` identical solves and keeps the first report with median timings.
fn timed_solve(
    a: &SparseMatrix,
    b: &BlockVector,
    m: &Preconditioner,
    cfg: SubalgebraConfig,
    opts: &SolveOptions,
    reps: usize,
) -> Result<(SolveReport, Option<[f64; 6]>), Failure> {
    let (_, report) = bcg_solve(a, b, None, m, cfg, opts)?;
    if reps == 0 {
        return Ok((report, None));
    }
    let mut all: Vec<KernelTimings> = vec![report.timings];
    for _ in 1..reps {
        all.push(bcg_solve(a, b, None, m, cfg, opts)?.1.timings);
    }
    let pick = |f: fn(&KernelTimings) -> Duration| median(all.iter().map(f).collect());
    let times = [
        pick(|t| t.bdot),
        pick(|t| t.baxpy),
        pick(|t| t.bop),
        pick(|t| t.bsolve),
        pick(|t| t.precond),
        pick(|t| t.total),
    ];
    Ok((report, Some(times)))
}

pub fn run(args: &SolveArgs, out: &mut dyn Write) -> CmdResult {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Failure::usage(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    if args.max_iter == Some(0) {
        return Err(Failure::usage("--max-iter must be at least 1"));
    }
    if args.reps == 0 {
        return Err(Failure::usage("--reps must be at least 1"));
    }
    // Flag-only checks first, so usage errors never wait on problem setup.
    if let (Some(k), Some(p)) = (args.k, args.p) {
        SubalgebraConfig::new(k, p, args.mode)?;
    }

    let op = operator(args)?;
    let n = op.a.n();
    let rhs = batches(args, n)?;
    let k = rhs[0].k();
    let p = args.p.unwrap_or(k);
    let cfg = SubalgebraConfig::new(k, p, args.mode)?;
    let m = Preconditioner::build(args.precond, &op.a)?;
    let mut opts = SolveOptions::default().with_tol(args.tol);
    opts.max_iter = args.max_iter;
    opts.record_history = false;

    let mut csv = writer(out, &RunRecord::HEADER)?;
    let mut code = exit::SUCCESS;
    for (batch, b) in rhs.iter().enumerate() {
        let reps = if args.timing { args.reps } else { 0 };
        let (rep, times) = timed_solve(&op.a, b, &m, cfg, &opts, reps)?;
        match rep.status {
            SolveStatus::Breakdown => {
                let bd = rep.breakdown.expect("breakdown status carries details");
                eprintln!(
                    "batch {batch}: breakdown at iteration {} (block {}, {:?})",
                    bd.iteration, bd.block, bd.source
                );
                code = exit::BREAKDOWN;
            }
            SolveStatus::MaxIterations => {
                eprintln!(
                    "batch {batch}: not converged after {} iterations",
                    rep.iterations
                );
                if code == exit::SUCCESS {
                    code = exit::MAX_ITER;
                }
            }
            SolveStatus::Converged => {}
        }
        let t = |i: usize| times.map(|v| v[i]);
        csv.serialize(RunRecord {
            nx: op.grid.map(|g| g.0),
            ny: op.grid.map(|g| g.1),
            n,
            k,
            p: cfg.p(),
            mode: cfg.mode().to_string(),
            precond: args.precond.to_string(),
            tol: args.tol,
            seed: args.seed,
            batch,
            iterations: rep.iterations,
            status: rep.status.as_str().to_string(),
            converged: rep.converged,
            breakdown_iteration: rep.breakdown.map(|b| b.iteration),
            max_residual: rep.final_residual.iter().copied().fold(0.0, f64::max),
            flops_bdot: rep.flops.bdot,
            flops_baxpy: rep.flops.baxpy,
            flops_bop: rep.flops.bop,
            flops_total: rep.flops.total(),
            time_bdot: t(0),
            time_baxpy: t(1),
            time_bop: t(2),
            time_bsolve: t(3),
            time_precond: t(4),
            time_total: t(5),
        })?;
    }
    csv.flush()?;
    Ok(code)
}

//! Built-in invariant suites on seeded desk-scale instances.

use std::f64::consts::PI;
use std::io::Write;

use blockkrylov::checks::{
    energy_errors, fitted_contraction, global_stacked, hybrid_split, iterate_history,
    parallel_reduction,
};
use blockkrylov::perfmodel::{characteristics, memory_crossover, predict, Bound};
use blockkrylov::reference::{dense_solve, max_rel_diff};
use blockkrylov::theory::{rate_classical, spectrum_of};
use blockkrylov::{
    bcg_solve, bdot, poisson2d, random_block_rhs, CoefficientField, FlopCounter, Kernel,
    MachineProfile, Mode, PoissonSpec, Preconditioner, PreconditionerKind, SolveOptions,
    SparseMatrix, Spectrum, SubalgebraConfig,
};

use crate::args::{Suite, VerifyArgs};
use crate::{exit, CmdResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = blockkrylov::Result<(bool, String)>;

fn outcome(suite: &'static str, name: &'static str, check: Check) -> Outcome {
    let (passed, detail) = check.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        suite,
        name,
        passed,
        detail,
    }
}

fn within(value: f64, limit: f64) -> (bool, String) {
    (value <= limit, format!("{value:.3e} <= {limit:.0e}"))
}

/// Heterogeneous 16×16 Poisson instance used by the equivalence checks.
fn instance() -> blockkrylov::Result<SparseMatrix> {
    poisson2d(&PoissonSpec::new(16, 16, CoefficientField::default(), 7)?)
}

fn equivalence() -> Vec<Outcome> {
    let s = "equivalence";
    let ilu = |a: &SparseMatrix| Preconditioner::build(PreconditionerKind::Ilu0, a);
    vec![
        outcome(
            s,
            "parallel_is_scalar_cg",
            (|| {
                let a = instance()?;
                let dev = parallel_reduction(&a, &random_block_rhs(256, 4, 1), &ilu(&a)?, 20)?;
                Ok(within(dev, 1e-12))
            })(),
        ),
        outcome(
            s,
            "hybrid_is_split_classical",
            (|| {
                let a = instance()?;
                let dev = hybrid_split(&a, &random_block_rhs(256, 8, 2), &ilu(&a)?, 4, 30)?;
                Ok(within(dev, 1e-12))
            })(),
        ),
        outcome(
            s,
            "global_is_stacked_classical",
            (|| {
                let a = instance()?;
                let dev = global_stacked(
                    &a,
                    &random_block_rhs(256, 8, 3),
                    PreconditionerKind::Ilu0,
                    4,
                    30,
                )?;
                Ok(within(dev, 1e-10))
            })(),
        ),
        outcome(
            s,
            "classical_hybrid_equals_global",
            (|| {
                let a = instance()?;
                let b = random_block_rhs(256, 4, 4);
                let m = ilu(&a)?;
                let opts = SolveOptions::default();
                let (xh, _) = bcg_solve(
                    &a,
                    &b,
                    None,
                    &m,
                    SubalgebraConfig::new(4, 4, Mode::Hybrid)?,
                    &opts,
                )?;
                let (xg, _) = bcg_solve(
                    &a,
                    &b,
                    None,
                    &m,
                    SubalgebraConfig::new(4, 4, Mode::Global)?,
                    &opts,
                )?;
                Ok(within(max_rel_diff(&xg, &xh), 0.0))
            })(),
        ),
        outcome(
            s,
            "coarse_product_restricts_to_fine",
            (|| {
                let x = random_block_rhs(64, 8, 5);
                let y = random_block_rhs(64, 8, 6);
                let fine = SubalgebraConfig::hybrid(8, 2)?;
                let direct = bdot(&x, &y, fine)?;
                let restricted =
                    bdot(&x, &y, SubalgebraConfig::hybrid(8, 4)?)?.restrict_to(fine)?;
                let dev = direct
                    .as_slice()
                    .iter()
                    .zip(restricted.as_slice())
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
                Ok(within(dev, 1e-14))
            })(),
        ),
    ]
}

fn flops() -> Vec<Outcome> {
    let s = "flops";
    vec![
        outcome(
            s,
            "kernel_counts_match_model",
            (|| {
                let mut cases = 0;
                let mut bad = Vec::new();
                for (nx, n) in [(8usize, 64u64), (16, 256)] {
                    let a = poisson2d(&PoissonSpec::constant(nx, nx))?;
                    for k in [4u64, 8] {
                        for p in [1u64, 2, 4, 8].into_iter().filter(|p| k % p == 0) {
                            for mode in [Mode::Hybrid, Mode::Global] {
                                let cfg = SubalgebraConfig::new(k as usize, p as usize, mode)?;
                                let x = random_block_rhs(n as usize, k as usize, 1);
                                let mut y = random_block_rhs(n as usize, k as usize, 2);
                                let mut f = FlopCounter::new();
                                let g = f.bdot(&x, &y, cfg)?;
                                f.baxpy(&mut y, &x, &g)?;
                                f.bop(&a, &x)?;
                                let z = Some(a.nnz() as u64);
                                let want = [Kernel::Bdot, Kernel::Baxpy, Kernel::Bop]
                                    .map(|kern| characteristics(kern, n, k, p, z).map(|c| c.omega));
                                let got = [f.bdot, f.baxpy, f.bop];
                                for (w, g) in want.into_iter().zip(got) {
                                    cases += 1;
                                    if w? != g {
                                        bad.push(format!("n={n} k={k} p={p} {mode}"));
                                    }
                                }
                            }
                        }
                    }
                }
                Ok((
                    bad.is_empty(),
                    format!("{} of {cases} counts exact", cases - bad.len()),
                ))
            })(),
        ),
        outcome(
            s,
            "solve_total_is_per_iteration_sum",
            (|| {
                let a = instance()?;
                let (n, k, p) = (256u64, 8u64, 4u64);
                let b = random_block_rhs(n as usize, k as usize, 9);
                let m = Preconditioner::build(PreconditionerKind::Ilu0, &a)?;
                let cfg = SubalgebraConfig::hybrid(8, 4)?;
                let (_, rep) = bcg_solve(&a, &b, None, &m, cfg, &SolveOptions::default())?;
                let it = rep.iterations as u64;
                let z = Some(a.nnz() as u64);
                let omega = |kern| characteristics(kern, n, k, p, z).map(|c| c.omega);
                let want = it * (3 * omega(Kernel::Bdot)? + 3 * omega(Kernel::Baxpy)?)
                    + (it + 1) * omega(Kernel::Bop)?;
                Ok((
                    rep.flops.total() == want,
                    format!("{} iterations, {} flops", it, rep.flops.total()),
                ))
            })(),
        ),
    ]
}

fn rates() -> Vec<Outcome> {
    let s = "rates";
    vec![
        outcome(
            s,
            "classical_contraction_within_bound",
            (|| {
                let diag: Vec<f64> = (1..=100).map(f64::from).collect();
                let a = SparseMatrix::from_diagonal(&diag);
                let b = random_block_rhs(100, 4, 7);
                let exact = dense_solve(&a.to_dense(), &b)?;
                let opts = SolveOptions::default().with_tol(1e-12);
                let cfg = SubalgebraConfig::classical(4)?;
                let (xs, _, _) = iterate_history(&a, &b, &Preconditioner::Identity, cfg, &opts)?;
                let mu = rate_classical(&Spectrum::new(diag)?, 4)?;
                let worst = fitted_contraction(&energy_errors(&a, &exact, &xs))
                    .into_iter()
                    .fold(0.0, f64::max);
                Ok((
                    worst <= mu + 0.05,
                    format!("fitted {worst:.4} vs bound {mu:.4}"),
                ))
            })(),
        ),
        outcome(
            s,
            "laplacian_spectrum_closed_form",
            (|| {
                let m = 8;
                let a = poisson2d(&PoissonSpec::constant(m, m))?;
                let h = PI / (m + 1) as f64;
                let mut want: Vec<f64> = (1..=m)
                    .flat_map(|i| {
                        (1..=m).map(move |j| {
                            4.0 - 2.0 * (i as f64 * h).cos() - 2.0 * (j as f64 * h).cos()
                        })
                    })
                    .collect();
                want.sort_by(f64::total_cmp);
                let got = spectrum_of(&a)?;
                let dev = got
                    .eigenvalues()
                    .iter()
                    .zip(&want)
                    .fold(0.0_f64, |acc, (g, w)| acc.max((g - w).abs() / w));
                Ok(within(dev, 1e-10))
            })(),
        ),
        outcome(
            s,
            "bound_decreases_with_k",
            (|| {
                let spec = Spectrum::new((1..=100).map(f64::from).collect())?;
                let r: Vec<f64> = (1..=16)
                    .map(|k| rate_classical(&spec, k))
                    .collect::<Result<_, _>>()?;
                Ok((
                    r.windows(2).all(|w| w[1] < w[0]),
                    format!("k=1: {:.4}, k=16: {:.4}", r[0], r[15]),
                ))
            })(),
        ),
    ]
}

fn model() -> Vec<Outcome> {
    let s = "model";
    let m = MachineProfile::skylake_reference();
    let n = 1_000_000;
    let plateau = |kernel| -> Check {
        let first = predict(&characteristics(kernel, n, 128, 1, None)?, &m);
        for p in [1, 2, 4, 8, 16] {
            let pr = predict(&characteristics(kernel, n, 128, p, None)?, &m);
            if pr.bound != Bound::Memory || pr.time != first.time {
                return Ok((false, format!("p={p} is {}-bound", pr.bound)));
            }
        }
        Ok((true, format!("memory-bound, T = {:.3e} s", first.time)))
    };
    vec![
        outcome(s, "bdot_plateau_up_to_16", plateau(Kernel::Bdot)),
        outcome(s, "baxpy_plateau_up_to_16", plateau(Kernel::Baxpy)),
        outcome(s, "bdot_crossover_17_to_24", {
            let p = memory_crossover(Kernel::Bdot, n, 128, None, &m);
            Ok((matches!(p, Some(17..=24)), format!("p* = {p:?}")))
        }),
        outcome(
            s,
            "profile_text_round_trip",
            (|| {
                let back = MachineProfile::parse(&m.to_text())?;
                Ok((back == m, "reference profile".to_string()))
            })(),
        ),
    ]
}

pub fn run_suite(suite: Suite) -> Vec<Outcome> {
    match suite {
        Suite::Equivalence => equivalence(),
        Suite::Flops => flops(),
        Suite::Rates => rates(),
        Suite::Model => model(),
        Suite::All => [equivalence(), flops(), rates(), model()].concat(),
    }
}

pub fn run(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let outcomes = run_suite(args.suite);
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    for o in &outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{mark}  {:<11}  {:<width$}  {}",
            o.suite, o.name, o.detail
        )?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed)?;
    Ok(if failed == 0 {
        exit::SUCCESS
    } else {
        exit::CHECK_FAILED
    })
}

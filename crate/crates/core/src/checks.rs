//! Executable cross-checks between subalgebra choices and reference solvers.
//!
//! Each function runs the block solver (and an independent route to the same
//! iterates) and returns the largest observed deviation; callers compare it
//! against their tolerance.

use crate::error::{Error, Result};
use crate::linalg::{column_norms, BlockVector, SparseMatrix, SubalgebraConfig};
use crate::precond::{Preconditioner, PreconditionerKind};
use crate::reference::{energy_norm, max_rel_diff, scalar_pcg_iterates};
use crate::solver::{bcg_solve_observed, SolveOptions, SolveReport};

/// Runs the solver and keeps every iterate `X⁰, X¹, …` and residual `R⁰, R¹, …`.
pub fn iterate_history(
    a: &SparseMatrix,
    b: &BlockVector,
    m: &Preconditioner,
    cfg: SubalgebraConfig,
    opts: &SolveOptions,
) -> Result<(Vec<BlockVector>, Vec<BlockVector>, SolveReport)> {
    let mut xs = Vec::new();
    let mut rs = Vec::new();
    let (_, report) = bcg_solve_observed(a, b, None, m, cfg, opts, |s| {
        xs.push(s.x.clone());
        rs.push(s.r.clone());
    })?;
    Ok((xs, rs, report))
}

fn capped(iterations: usize) -> SolveOptions {
    SolveOptions::default().with_max_iter(iterations)
}

/// `p = 1` hybrid iterates against scalar PCG per column. Returns the largest
/// per-iteration, per-column deviation relative to the scalar iterate's max-norm.
pub fn parallel_reduction(
    a: &SparseMatrix,
    b: &BlockVector,
    m: &Preconditioner,
    iterations: usize,
) -> Result<f64> {
    let cfg = SubalgebraConfig::parallel(b.k())?;
    let (xs, _, _) = iterate_history(a, b, m, cfg, &capped(iterations))?;
    let mut worst = 0.0_f64;
    for s in 0..b.k() {
        let scalar = scalar_pcg_iterates(a, &b.column(s), m, iterations)?;
        for (xb, xr) in xs.iter().zip(&scalar).skip(1) {
            let scale = xr
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()))
                .max(f64::MIN_POSITIVE);
            let dev = (0..a.n()).fold(0.0_f64, |m, r| m.max((xb.get(r, s) - xr[r]).abs()));
            worst = worst.max(dev / scale);
        }
    }
    Ok(worst)
}

/// Hybrid `(k, p)` against `q` independent classical `p`-column runs on the
/// contiguous column groups. Returns the largest relative max-norm deviation.
pub fn hybrid_split(
    a: &SparseMatrix,
    b: &BlockVector,
    m: &Preconditioner,
    p: usize,
    iterations: usize,
) -> Result<f64> {
    let cfg = SubalgebraConfig::hybrid(b.k(), p)?;
    let (xs, _, _) = iterate_history(a, b, m, cfg, &capped(iterations))?;
    let mut worst = 0.0_f64;
    for g in 0..cfg.q() {
        let group = b.columns(g * p, p);
        let (gx, _, _) = iterate_history(
            a,
            &group,
            m,
            SubalgebraConfig::classical(p)?,
            &capped(iterations),
        )?;
        for (full, part) in xs.iter().zip(&gx).skip(1) {
            worst = worst.max(max_rel_diff(&full.columns(g * p, p), part));
        }
    }
    Ok(worst)
}

/// Stacks the `q` contiguous column groups of an n×k block into a qn×p block.
pub fn stack_groups(x: &BlockVector, p: usize) -> Result<BlockVector> {
    if p == 0 || !x.k().is_multiple_of(p) {
        return Err(Error::config(format!(
            "p = {p} does not divide k = {}",
            x.k()
        )));
    }
    let (n, q) = (x.n(), x.k() / p);
    Ok(BlockVector::from_fn(q * n, p, |r, c| {
        x.get(r % n, (r / n) * p + c)
    }))
}

/// Inverse of [`stack_groups`].
pub fn unstack_groups(x: &BlockVector, q: usize) -> Result<BlockVector> {
    if q == 0 || !x.n().is_multiple_of(q) {
        return Err(Error::config(format!("q = {q} does not divide {}", x.n())));
    }
    let (n, p) = (x.n() / q, x.k());
    Ok(BlockVector::from_fn(n, q * p, |r, c| {
        x.get((c / p) * n + r, c % p)
    }))
}

/// Global `(k, p)` on `A` against classical `p`-column block CG on
/// `diag(A, …, A)` with the column groups stacked. The preconditioner of the
/// stacked system is built from the same kind on the block-diagonal matrix.
pub fn global_stacked(
    a: &SparseMatrix,
    b: &BlockVector,
    kind: PreconditionerKind,
    p: usize,
    iterations: usize,
) -> Result<f64> {
    let cfg = SubalgebraConfig::global(b.k(), p)?;
    let q = cfg.q();
    let m = Preconditioner::build(kind, a)?;
    let (xs, _, _) = iterate_history(a, b, &m, cfg, &capped(iterations))?;

    let big = a.block_diagonal(q);
    let big_m = Preconditioner::build(kind, &big)?;
    let stacked_b = stack_groups(b, p)?;
    let (sx, _, _) = iterate_history(
        &big,
        &stacked_b,
        &big_m,
        SubalgebraConfig::classical(p)?,
        &capped(iterations),
    )?;
    let mut worst = 0.0_f64;
    for (xg, xs_stacked) in xs.iter().zip(&sx).skip(1) {
        worst = worst.max(max_rel_diff(xg, &unstack_groups(xs_stacked, q)?));
    }
    Ok(worst)
}

/// Per-column energy errors `‖X* − Xⁱ‖_A` for every recorded iterate.
pub fn energy_errors(a: &SparseMatrix, exact: &BlockVector, xs: &[BlockVector]) -> Vec<Vec<f64>> {
    xs.iter()
        .map(|x| {
            (0..x.k())
                .map(|s| {
                    let e: Vec<f64> = (0..x.n()).map(|r| exact.get(r, s) - x.get(r, s)).collect();
                    energy_norm(a, &e)
                })
                .collect()
        })
        .collect()
}

/// Largest relative increase `(eⁱ − eⁱ⁻¹)/e⁰` of the per-column energy error
/// between consecutive iterates; ≤ 0 means monotone.
pub fn energy_monotonicity(errors: &[Vec<f64>]) -> f64 {
    let Some(first) = errors.first() else {
        return 0.0;
    };
    let mut worst = f64::NEG_INFINITY;
    for w in errors.windows(2) {
        for s in 0..first.len() {
            let scale = first[s].max(f64::MIN_POSITIVE);
            worst = worst.max((w[1][s] - w[0][s]) / scale);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Largest per-column `‖(B − A Xⁱ) − Rⁱ‖ / ‖B‖` over recorded iterates.
pub fn residual_gap(
    a: &SparseMatrix,
    b: &BlockVector,
    xs: &[BlockVector],
    rs: &[BlockVector],
) -> Result<f64> {
    let bn = column_norms(b);
    let mut worst = 0.0_f64;
    for (x, r) in xs.iter().zip(rs) {
        let mut gap = b.clone();
        gap.axpby(1.0, -1.0, &crate::linalg::bop(a, x)?)?;
        gap.axpby(1.0, -1.0, r)?;
        for (g, nb) in column_norms(&gap).iter().zip(&bn) {
            worst = worst.max(if *nb > 0.0 { g / nb } else { *g });
        }
    }
    Ok(worst)
}

/// Asymptotic per-iteration contraction of each column: `exp` of the
/// least-squares slope of `ln(eⁱ/e⁰)` over the last half of the iterates.
/// Iterates whose error has reached zero are dropped.
pub fn fitted_contraction(errors: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = errors.first() else {
        return Vec::new();
    };
    let cols = first.len();
    (0..cols)
        .map(|s| {
            let pts: Vec<(f64, f64)> = errors
                .iter()
                .enumerate()
                .filter(|(_, e)| e[s] > 0.0 && first[s] > 0.0)
                .map(|(i, e)| (i as f64, (e[s] / first[s]).ln()))
                .collect();
            let tail = &pts[pts.len() / 2..];
            if tail.len() < 2 {
                return 0.0;
            }
            let n = tail.len() as f64;
            let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
            let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = tail.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            (sxy / sxx).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stacking_round_trip() {
        let x = BlockVector::from_fn(3, 6, |r, c| (10 * r + c) as f64);
        let s = stack_groups(&x, 2).unwrap();
        assert_eq!((s.n(), s.k()), (9, 2));
        // second group (columns 2,3) sits in rows 3..6
        assert_eq!(s.row(4), &[12.0, 13.0]);
        assert_eq!(unstack_groups(&s, 3).unwrap(), x);
        assert!(stack_groups(&x, 4).is_err());
    }

    #[test]
    fn contraction_of_geometric_sequence() {
        let errs: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![0.5f64.powi(i), 0.9f64.powi(i)])
            .collect();
        let rates = fitted_contraction(&errs);
        assert!((rates[0] - 0.5).abs() < 1e-12);
        assert!((rates[1] - 0.9).abs() < 1e-12);
        assert!(energy_monotonicity(&errs) <= 0.0);
    }
}

//! Preconditioned block conjugate gradients with a recomputed ρ.
//!
//! One iteration, for a subalgebra 𝔸 chosen by [`SubalgebraConfig`]:
//!
//! ```text
//! Q  = A P
//! α  = ⟪P, Q⟫            ρ_old = ⟪P, R⟫   (recomputed every iteration)
//! λ  = α⁻¹ ρ_old
//! X += P λ               R -= Q λ
//! Z  = M⁻¹ R             ρ_new = ⟪Z, R⟫
//! β  = ρ_old⁻¹ ρ_new
//! P  = Z + P β
//! ```
//!
//! starting from `R = B − A X⁰` and `P = M⁻¹ R`. The body always runs to
//! completion before the per-column stopping test on `R`, so every
//! iteration costs exactly one `bop`, three `bdot` and three `baxpy` calls.

use std::time::Duration;
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
use std::time::Instant;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
use wasm_clock::Instant;

/// `std::time::Instant::now` panics on wasm32-unknown-unknown, so timings
/// read as zero there.
#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
mod wasm_clock {
    use std::time::Duration;

    #[derive(Clone, Copy)]
    pub struct Instant;

    impl Instant {
        pub fn now() -> Self {
            Instant
        }

        pub fn elapsed(&self) -> Duration {
            Duration::ZERO
        }
    }
}

use crate::error::{Error, Result};
use crate::linalg::{
    bop, bsolve, column_norms, BlockVector, FlopCounter, SparseMatrix, SubalgebraConfig,
};
use crate::precond::Preconditioner;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Per-column relative defect reduction target.
    pub tol: f64,
    /// Iteration cap; `None` means `10·n`.
    pub max_iter: Option<usize>,
    pub record_history: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: None,
            record_history: true,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::config("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Breakdown,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::Breakdown => "breakdown",
        }
    }
}

/// Which coefficient could not be inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakdownSource {
    /// `α = ⟪P, Q⟫` while forming `λ`.
    Alpha,
    /// `ρ = ⟪P, R⟫` while forming `β`.
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Breakdown {
    pub iteration: usize,
    pub block: usize,
    pub source: BreakdownSource,
}

/// Accumulated wall-clock time per kernel (all zero on wasm32-unknown-unknown).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KernelTimings {
    pub bdot: Duration,
    pub baxpy: Duration,
    pub bop: Duration,
    pub bsolve: Duration,
    pub precond: Duration,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    /// Column norms of `R⁰, R¹, …`; `iterations + 1` entries when recorded.
    pub defect_history: Vec<Vec<f64>>,
    /// Column norms of `B`.
    pub rhs_norms: Vec<f64>,
    /// Includes the one `bop` that forms `R⁰`.
    pub flops: FlopCounter,
    pub breakdown: Option<Breakdown>,
    /// Explicit `‖B − A X‖` per column at termination, relative to `‖B‖`
    /// (absolute for zero columns of `B`).
    pub final_residual: Vec<f64>,
    pub timings: KernelTimings,
}

/// Snapshot handed to an observer after each iteration (and once for the
/// start, with `iteration == 0`).
#[derive(Debug)]
pub struct IterationState<'a> {
    pub iteration: usize,
    pub x: &'a BlockVector,
    pub r: &'a BlockVector,
    pub p: &'a BlockVector,
}

/// Solves `A X = B` for all columns of `B` at once.
pub fn bcg_solve(
    a: &SparseMatrix,
    b: &BlockVector,
    x0: Option<&BlockVector>,
    m: &Preconditioner,
    cfg: SubalgebraConfig,
    opts: &SolveOptions,
) -> Result<(BlockVector, SolveReport)> {
    bcg_solve_observed(a, b, x0, m, cfg, opts, |_| {})
}

/// [`bcg_solve`] with a callback receiving the iterates.
pub fn bcg_solve_observed(
    a: &SparseMatrix,
    b: &BlockVector,
    x0: Option<&BlockVector>,
    m: &Preconditioner,
    cfg: SubalgebraConfig,
    opts: &SolveOptions,
    mut observer: impl FnMut(&IterationState<'_>),
) -> Result<(BlockVector, SolveReport)> {
    opts.validate()?;
    let (n, k) = (b.n(), b.k());
    if a.n() != n {
        return Err(Error::dim(format!("A has n = {}, B has n = {n}", a.n())));
    }
    if cfg.k() != k {
        return Err(Error::dim(format!(
            "subalgebra has k = {}, B has k = {k}",
            cfg.k()
        )));
    }
    if let Some(x0) = x0 {
        x0.check_same_shape(b)?;
    }
    if let Some(dim) = m.dim() {
        if dim != n {
            return Err(Error::dim(format!(
                "preconditioner has n = {dim}, B has n = {n}"
            )));
        }
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n.max(1));
    let start = Instant::now();

    let mut flops = FlopCounter::new();
    let mut timings = KernelTimings::default();
    let rhs_norms = column_norms(b);
    let thresholds: Vec<f64> = rhs_norms
        .iter()
        .map(|&nb| if nb > 0.0 { opts.tol * nb } else { opts.tol })
        .collect();
    let converged_at = |r: &BlockVector| {
        column_norms(r)
            .iter()
            .zip(&thresholds)
            .all(|(rn, t)| rn <= t)
    };

    let mut x = x0.cloned().unwrap_or_else(|| BlockVector::zeros(n, k));
    let mut q = BlockVector::zeros(n, k);
    let mut z = BlockVector::zeros(n, k);
    let mut next_p = BlockVector::zeros(n, k);

    // R⁰ = B − A X⁰
    let t = Instant::now();
    flops.bop_into(a, &x, &mut q)?;
    timings.bop += t.elapsed();
    let mut r = b.clone();
    r.axpby(1.0, -1.0, &q)?;

    // P¹ = M⁻¹ R⁰
    let mut p = BlockVector::zeros(n, k);
    let t = Instant::now();
    m.apply_into(&r, &mut p)?;
    timings.precond += t.elapsed();

    let mut history = Vec::new();
    if opts.record_history {
        history.push(column_norms(&r));
    }
    observer(&IterationState {
        iteration: 0,
        x: &x,
        r: &r,
        p: &p,
    });

    let mut iterations = 0;
    let mut status = SolveStatus::MaxIterations;
    let mut breakdown = None;

    if converged_at(&r) {
        status = SolveStatus::Converged;
    } else {
        for i in 1..=max_iter {
            let t = Instant::now();
            flops.bop_into(a, &p, &mut q)?;
            timings.bop += t.elapsed();

            let t = Instant::now();
            let alpha = flops.bdot(&p, &q, cfg)?;
            let rho_old = flops.bdot(&p, &r, cfg)?;
            timings.bdot += t.elapsed();

            let t = Instant::now();
            let lambda = bsolve(&alpha, &rho_old);
            timings.bsolve += t.elapsed();
            let lambda = match lambda {
                Ok(l) => l,
                Err(Error::Breakdown { block }) => {
                    breakdown = Some(Breakdown {
                        iteration: i,
                        block,
                        source: BreakdownSource::Alpha,
                    });
                    status = SolveStatus::Breakdown;
                    break;
                }
                Err(e) => return Err(e),
            };

            let t = Instant::now();
            flops.baxpy(&mut x, &p, &lambda)?;
            flops.baxpy(&mut r, &q, &lambda.negated())?;
            timings.baxpy += t.elapsed();

            let t = Instant::now();
            m.apply_into(&r, &mut z)?;
            timings.precond += t.elapsed();

            let t = Instant::now();
            let rho_new = flops.bdot(&z, &r, cfg)?;
            timings.bdot += t.elapsed();

            let t = Instant::now();
            let beta = bsolve(&rho_old, &rho_new);
            timings.bsolve += t.elapsed();
            iterations = i;
            let beta = match beta {
                Ok(bt) => Some(bt),
                Err(Error::Breakdown { block }) => {
                    breakdown = Some(Breakdown {
                        iteration: i,
                        block,
                        source: BreakdownSource::Rho,
                    });
                    None
                }
                Err(e) => return Err(e),
            };
            if let Some(beta) = &beta {
                let t = Instant::now();
                next_p.copy_from(&z)?;
                flops.baxpy(&mut next_p, &p, beta)?;
                std::mem::swap(&mut p, &mut next_p);
                timings.baxpy += t.elapsed();
            }

            if opts.record_history {
                history.push(column_norms(&r));
            }
            observer(&IterationState {
                iteration: i,
                x: &x,
                r: &r,
                p: &p,
            });

            if converged_at(&r) {
                status = SolveStatus::Converged;
                break;
            }
            if beta.is_none() {
                status = SolveStatus::Breakdown;
                break;
            }
        }
    }

    // Explicit residual, outside the instrumented kernels.
    let ax = bop(a, &x)?;
    let mut explicit = b.clone();
    explicit.axpby(1.0, -1.0, &ax)?;
    let final_residual = column_norms(&explicit)
        .into_iter()
        .zip(&rhs_norms)
        .map(|(rn, &nb)| if nb > 0.0 { rn / nb } else { rn })
        .collect();
    timings.total = start.elapsed();

    let report = SolveReport {
        iterations,
        converged: status == SolveStatus::Converged,
        status,
        defect_history: history,
        rhs_norms,
        flops,
        breakdown,
        final_residual,
        timings,
    };
    Ok((x, report))
}

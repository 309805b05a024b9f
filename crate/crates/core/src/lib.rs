//! Preconditioned block conjugate gradients for sparse SPD systems with
//! many right-hand sides.
//!
//! The block coefficients of the method live in a *-subalgebra of
//! ℝ^{k×k}, selected by [`SubalgebraConfig`]: classical block CG, `k`
//! independent CG runs (parallel), or anything in between (hybrid and
//! global with block width `p`). Around the solver sit
//!
//! * [`linalg`]: block vectors, CSR matrices and the four instrumented kernels,
//! * [`precond`]: identity, Jacobi and ILU(0),
//! * [`perfmodel`]: an analytic `max(T_comp, T_mem, T_reg)` runtime model,
//! * [`theory`]: convergence-rate bounds and a dense eigensolver,
//! * [`problems`]: heterogeneous 2D Poisson operators and random right-hand sides,
//! * [`io`]: Matrix Market and dense block vector files.
//!
//! ```
//! use blockkrylov::{bcg_solve, poisson2d, random_block_rhs, PoissonSpec};
//! use blockkrylov::{Preconditioner, PreconditionerKind, SolveOptions, SubalgebraConfig};
//!
//! let a = poisson2d(&PoissonSpec::constant(8, 8)).unwrap();
//! let b = random_block_rhs(a.n(), 4, 1);
//! let m = Preconditioner::build(PreconditionerKind::Ilu0, &a).unwrap();
//! let cfg = SubalgebraConfig::hybrid(4, 2).unwrap();
//! let (_x, report) = bcg_solve(&a, &b, None, &m, cfg, &SolveOptions::default()).unwrap();
//! assert!(report.converged);
//! ```

pub mod checks;
pub mod error;
pub mod io;
pub mod linalg;
pub mod perfmodel;
pub mod precond;
pub mod problems;
pub mod reference;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::{
    baxpy, bdot, bop, bsolve, column_norms, BlockCoefficient, BlockVector, FlopCounter, Mode,
    SparseMatrix, SubalgebraConfig,
};
pub use perfmodel::{Bound, Kernel, KernelCharacteristics, MachineProfile, Prediction};
pub use precond::{Ilu0, Preconditioner, PreconditionerKind};
pub use problems::{poisson2d, random_block_rhs, CoefficientField, PoissonSpec};
pub use solver::{
    bcg_solve, bcg_solve_observed, Breakdown, BreakdownSource, IterationState, SolveOptions,
    SolveReport, SolveStatus,
};
pub use theory::{rate_classical, rate_global, spectrum_of, Spectrum};

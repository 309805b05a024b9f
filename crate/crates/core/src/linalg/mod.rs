//! Block vectors, sparse operators, subalgebra coefficients and the block kernels.

mod block_vector;
mod kernels;
mod sparse;
mod subalgebra;

pub use block_vector::{column_norms, BlockVector};
pub use kernels::{baxpy, bdot, bop, bop_into, bsolve, FlopCounter, SINGULAR_PIVOT_TOL};
pub use sparse::{SparseMatrix, SYMMETRY_TOL};
pub use subalgebra::{BlockCoefficient, Mode, SubalgebraConfig};

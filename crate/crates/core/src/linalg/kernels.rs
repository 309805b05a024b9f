//! The four block kernels: `bdot`, `baxpy`, `bop` and `bsolve`.
//!
//! Every kernel walks the block vectors row by row and touches all `k`
//! lanes of a row before moving on. [`FlopCounter`] wraps the first three
//! with exact operation counting (one multiply = one flop, one add = one flop).

use std::ops::{Add, AddAssign};

use super::block_vector::BlockVector;
use super::sparse::SparseMatrix;
use super::subalgebra::{BlockCoefficient, Mode, SubalgebraConfig};
use crate::error::{Error, Result};

/// Pivots below this fraction of the block max-norm are treated as singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-14;

/// Block product `⟪X, Y⟫` in the subalgebra `cfg`.
///
/// Hybrid: block `i` is `X_iᵀ Y_i` over column group `i`.
/// Global: the single block is `Σ_i X_iᵀ Y_i`.
pub fn bdot(x: &BlockVector, y: &BlockVector, cfg: SubalgebraConfig) -> Result<BlockCoefficient> {
    x.check_same_shape(y)?;
    check_columns(x, cfg)?;
    let p = cfg.p();
    let pp = p * p;
    let mut acc = vec![0.0; cfg.block_count() * pp];
    match cfg.mode() {
        Mode::Hybrid => {
            for (xr, yr) in x.rows().zip(y.rows()) {
                for ((xg, yg), block) in xr
                    .chunks_exact(p)
                    .zip(yr.chunks_exact(p))
                    .zip(acc.chunks_exact_mut(pp))
                {
                    accumulate_outer(block, xg, yg);
                }
            }
        }
        Mode::Global => {
            for (xr, yr) in x.rows().zip(y.rows()) {
                for (xg, yg) in xr.chunks_exact(p).zip(yr.chunks_exact(p)) {
                    accumulate_outer(&mut acc, xg, yg);
                }
            }
        }
    }
    Ok(BlockCoefficient::from_raw(cfg, acc))
}

#[inline(always)]
fn accumulate_outer(block: &mut [f64], xg: &[f64], yg: &[f64]) {
    let p = xg.len();
    for (a, &xa) in xg.iter().enumerate() {
        for (dst, &yb) in block[a * p..(a + 1) * p].iter_mut().zip(yg) {
            *dst += xa * yb;
        }
    }
}

/// In-place update `X ← X + Y·Γ`, where `Γ` is the k×k embedding of `gamma`.
pub fn baxpy(x: &mut BlockVector, y: &BlockVector, gamma: &BlockCoefficient) -> Result<()> {
    x.check_same_shape(y)?;
    let cfg = gamma.config();
    check_columns(x, cfg)?;
    let p = cfg.p();
    let mut tmp = vec![0.0; p];
    for r in 0..x.n() {
        let yr = y.row(r);
        let xr = x.row_mut(r);
        for (g, (xg, yg)) in xr.chunks_exact_mut(p).zip(yr.chunks_exact(p)).enumerate() {
            let c = gamma.block(cfg.block_for_group(g));
            tmp.fill(0.0);
            for (a, &ya) in yg.iter().enumerate() {
                for (t, &cab) in tmp.iter_mut().zip(&c[a * p..(a + 1) * p]) {
                    *t += ya * cab;
                }
            }
            for (xv, t) in xg.iter_mut().zip(&tmp) {
                *xv += t;
            }
        }
    }
    Ok(())
}

/// Operator application `Y = A·X`.
pub fn bop(a: &SparseMatrix, x: &BlockVector) -> Result<BlockVector> {
    let mut y = BlockVector::zeros(x.n(), x.k());
    bop_into(a, x, &mut y)?;
    Ok(y)
}

/// `Y = A·X` into a preallocated block.
pub fn bop_into(a: &SparseMatrix, x: &BlockVector, y: &mut BlockVector) -> Result<()> {
    if a.n() != x.n() {
        return Err(Error::dim(format!(
            "operator has n = {}, block vector has n = {}",
            a.n(),
            x.n()
        )));
    }
    x.check_same_shape(y)?;
    for r in 0..a.n() {
        let (cols, vals) = a.row(r);
        let yr = y.row_mut(r);
        yr.fill(0.0);
        for (&c, &v) in cols.iter().zip(vals) {
            for (dst, &xv) in yr.iter_mut().zip(x.row(c)) {
                *dst += v * xv;
            }
        }
    }
    Ok(())
}

/// Solves `gamma · result = delta` inside the subalgebra.
///
/// Each p×p block is factored by LU with partial pivoting. A pivot smaller
/// than [`SINGULAR_PIVOT_TOL`] times the block max-norm raises
/// [`Error::Breakdown`] with the offending block index.
pub fn bsolve(gamma: &BlockCoefficient, delta: &BlockCoefficient) -> Result<BlockCoefficient> {
    let cfg = gamma.config();
    if delta.config() != cfg {
        return Err(Error::dim(format!(
            "bsolve operands live in {} and {}",
            cfg,
            delta.config()
        )));
    }
    let p = cfg.p();
    let mut out = delta.clone();
    let mut lu = vec![0.0; p * p];
    for b in 0..cfg.block_count() {
        lu.copy_from_slice(gamma.block(b));
        let scale = lu.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let rhs = out.block_mut(b);
        lu_solve_in_place(&mut lu, rhs, p, scale).map_err(|()| Error::Breakdown { block: b })?;
    }
    Ok(out)
}

/// Solves `L U X = rhs` for a p×p row-major system with p right-hand sides.
fn lu_solve_in_place(lu: &mut [f64], rhs: &mut [f64], p: usize, scale: f64) -> Result<(), ()> {
    let threshold = SINGULAR_PIVOT_TOL * scale;
    for col in 0..p {
        let (piv_row, piv_abs) =
            (col..p)
                .map(|r| (r, lu[r * p + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs.is_nan() || piv_abs < threshold || piv_abs == 0.0 {
            return Err(());
        }
        if piv_row != col {
            for j in 0..p {
                lu.swap(col * p + j, piv_row * p + j);
                rhs.swap(col * p + j, piv_row * p + j);
            }
        }
        let pivot = lu[col * p + col];
        for r in col + 1..p {
            let factor = lu[r * p + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[r * p + col] = factor;
            for j in col + 1..p {
                lu[r * p + j] -= factor * lu[col * p + j];
            }
            for j in 0..p {
                rhs[r * p + j] -= factor * rhs[col * p + j];
            }
        }
    }
    for col in (0..p).rev() {
        let pivot = lu[col * p + col];
        for j in 0..p {
            let mut s = rhs[col * p + j];
            for m in col + 1..p {
                s -= lu[col * p + m] * rhs[m * p + j];
            }
            rhs[col * p + j] = s / pivot;
        }
    }
    Ok(())
}

fn check_columns(x: &BlockVector, cfg: SubalgebraConfig) -> Result<()> {
    if x.k() != cfg.k() {
        return Err(Error::dim(format!(
            "block vector has k = {}, subalgebra has k = {}",
            x.k(),
            cfg.k()
        )));
    }
    Ok(())
}

/// Cumulative floating point operation counts per kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounter {
    pub bdot: u64,
    pub baxpy: u64,
    pub bop: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.bdot + self.baxpy + self.bop
    }

    /// Counted [`bdot`]: adds `2·n·p²·q`.
    pub fn bdot(
        &mut self,
        x: &BlockVector,
        y: &BlockVector,
        cfg: SubalgebraConfig,
    ) -> Result<BlockCoefficient> {
        let c = bdot(x, y, cfg)?;
        self.bdot += block_product_flops(x.n(), cfg);
        Ok(c)
    }

    /// Counted [`baxpy`]: adds `2·n·p²·q`.
    pub fn baxpy(
        &mut self,
        x: &mut BlockVector,
        y: &BlockVector,
        gamma: &BlockCoefficient,
    ) -> Result<()> {
        baxpy(x, y, gamma)?;
        self.baxpy += block_product_flops(x.n(), gamma.config());
        Ok(())
    }

    /// Counted [`bop_into`]: adds `2·k·z`.
    pub fn bop_into(
        &mut self,
        a: &SparseMatrix,
        x: &BlockVector,
        y: &mut BlockVector,
    ) -> Result<()> {
        bop_into(a, x, y)?;
        self.bop += 2 * (x.k() as u64) * (a.nnz() as u64);
        Ok(())
    }

    pub fn bop(&mut self, a: &SparseMatrix, x: &BlockVector) -> Result<BlockVector> {
        let mut y = BlockVector::zeros(x.n(), x.k());
        self.bop_into(a, x, &mut y)?;
        Ok(y)
    }
}

fn block_product_flops(n: usize, cfg: SubalgebraConfig) -> u64 {
    let (n, p, q) = (n as u64, cfg.p() as u64, cfg.q() as u64);
    2 * n * p * p * q
}

impl Add for FlopCounter {
    type Output = FlopCounter;

    fn add(self, rhs: Self) -> Self {
        FlopCounter {
            bdot: self.bdot + rhs.bdot,
            baxpy: self.baxpy + rhs.baxpy,
            bop: self.bop + rhs.bop,
        }
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

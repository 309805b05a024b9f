//! Plain dense and scalar routines used to cross-check the block solver.
//!
//! Nothing here goes through the block kernels; these are deliberately
//! naive loops over `Vec<f64>`.

use crate::error::{Error, Result};
use crate::linalg::{BlockVector, SparseMatrix};
use crate::precond::Preconditioner;

/// Solves `A X = B` by dense LU with partial pivoting. `A` is row-major n×n.
pub fn dense_solve(a: &[f64], b: &BlockVector) -> Result<BlockVector> {
    let n = b.n();
    if a.len() != n * n {
        return Err(Error::dim("dense matrix and right-hand side disagree"));
    }
    let mut lu = a.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| lu[i * n + col].abs().total_cmp(&lu[j * n + col].abs()))
            .expect("non-empty range");
        if lu[piv * n + col] == 0.0 {
            return Err(Error::Factorization { row: col });
        }
        if piv != col {
            for j in 0..n {
                lu.swap(col * n + j, piv * n + j);
            }
            perm.swap(col, piv);
        }
        let d = lu[col * n + col];
        for i in col + 1..n {
            let f = lu[i * n + col] / d;
            lu[i * n + col] = f;
            if f != 0.0 {
                for j in col + 1..n {
                    lu[i * n + j] -= f * lu[col * n + j];
                }
            }
        }
    }
    let mut x = BlockVector::zeros(n, b.k());
    for s in 0..b.k() {
        let mut y: Vec<f64> = perm.iter().map(|&p| b.get(p, s)).collect();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= lu[i * n + j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= lu[i * n + j] * y[j];
            }
            y[i] = acc / lu[i * n + i];
        }
        for (i, v) in y.into_iter().enumerate() {
            x.set(i, s, v);
        }
    }
    Ok(x)
}

/// Row-major `m×inner` times `inner×n`.
pub fn dense_matmul(a: &[f64], b: &[f64], m: usize, inner: usize, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * n];
    for i in 0..m {
        for l in 0..inner {
            let ail = a[i * inner + l];
            for j in 0..n {
                c[i * n + j] += ail * b[l * n + j];
            }
        }
    }
    c
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Preconditioned scalar CG following the same line sequence as the block
/// solver (ρ recomputed as `⟨p, r⟩`). Returns `x⁰, x¹, …` for up to
/// `iterations` steps; stops early on an exactly vanishing denominator.
pub fn scalar_pcg_iterates(
    a: &SparseMatrix,
    b: &[f64],
    m: &Preconditioner,
    iterations: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = a.n();
    let precond = |v: &[f64]| -> Result<Vec<f64>> {
        let block = BlockVector::from_vec(n, 1, v.to_vec())?;
        Ok(m.apply(&block)?.into_vec())
    };
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = precond(&r)?;
    let mut out = vec![x.clone()];
    for _ in 0..iterations {
        let q = a.mul_vec(&p);
        let alpha = dot(&p, &q);
        let rho_old = dot(&p, &r);
        if alpha == 0.0 {
            break;
        }
        let lambda = rho_old / alpha;
        for i in 0..n {
            x[i] += p[i] * lambda;
            r[i] -= q[i] * lambda;
        }
        let z = precond(&r)?;
        let rho_new = dot(&z, &r);
        out.push(x.clone());
        if rho_old == 0.0 {
            break;
        }
        let beta = rho_new / rho_old;
        for i in 0..n {
            p[i] = z[i] + p[i] * beta;
        }
    }
    Ok(out)
}

/// `√(eᵀ A e)`.
pub fn energy_norm(a: &SparseMatrix, e: &[f64]) -> f64 {
    dot(e, &a.mul_vec(e)).max(0.0).sqrt()
}

/// Largest relative entrywise deviation between two blocks, measured
/// against the max-norm of `reference`.
pub fn max_rel_diff(x: &BlockVector, reference: &BlockVector) -> f64 {
    let scale = reference.max_abs().max(f64::MIN_POSITIVE);
    x.as_slice()
        .iter()
        .zip(reference.as_slice())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        / scale
}

/// Per-column `‖x_s − ref_s‖ / ‖ref_s‖`.
pub fn column_rel_errors(x: &BlockVector, reference: &BlockVector) -> Vec<f64> {
    (0..x.k())
        .map(|s| {
            let (mut num, mut den) = (0.0, 0.0);
            for r in 0..x.n() {
                let d = x.get(r, s) - reference.get(r, s);
                num += d * d;
                den += reference.get(r, s) * reference.get(r, s);
            }
            if den > 0.0 {
                (num / den).sqrt()
            } else {
                num.sqrt()
            }
        })
        .collect()
}

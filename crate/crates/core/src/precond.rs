//! Preconditioners `M⁻¹` applied to whole block vectors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{BlockVector, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    Identity,
    Jacobi,
    Ilu0,
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreconditionerKind::Identity => "identity",
            PreconditionerKind::Jacobi => "jacobi",
            PreconditionerKind::Ilu0 => "ilu0",
        })
    }
}

impl FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(Self::Identity),
            "jacobi" => Ok(Self::Jacobi),
            "ilu0" | "ilu" => Ok(Self::Ilu0),
            other => Err(Error::config(format!("unknown preconditioner '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Preconditioner {
    Identity,
    /// Reciprocal of the matrix diagonal.
    Jacobi(Vec<f64>),
    Ilu0(Ilu0),
}

impl Preconditioner {
    pub fn build(kind: PreconditionerKind, a: &SparseMatrix) -> Result<Self> {
        match kind {
            PreconditionerKind::Identity => Ok(Self::Identity),
            PreconditionerKind::Jacobi => Self::jacobi(a),
            PreconditionerKind::Ilu0 => Ok(Self::Ilu0(Ilu0::factor(a)?)),
        }
    }

    pub fn jacobi(a: &SparseMatrix) -> Result<Self> {
        let inv = a
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(row, d)| {
                if d > 0.0 && d.is_finite() {
                    Ok(1.0 / d)
                } else {
                    Err(Error::Factorization { row })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Jacobi(inv))
    }

    pub fn kind(&self) -> PreconditionerKind {
        match self {
            Self::Identity => PreconditionerKind::Identity,
            Self::Jacobi(_) => PreconditionerKind::Jacobi,
            Self::Ilu0(_) => PreconditionerKind::Ilu0,
        }
    }

    /// Dimension the preconditioner was built for; `None` for the identity.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Identity => None,
            Self::Jacobi(d) => Some(d.len()),
            Self::Ilu0(f) => Some(f.n),
        }
    }

    /// `Z = M⁻¹ R`.
    pub fn apply(&self, r: &BlockVector) -> Result<BlockVector> {
        let mut z = BlockVector::zeros(r.n(), r.k());
        self.apply_into(r, &mut z)?;
        Ok(z)
    }

    pub fn apply_into(&self, r: &BlockVector, z: &mut BlockVector) -> Result<()> {
        r.check_same_shape(z)?;
        if let Some(n) = self.dim() {
            if n != r.n() {
                return Err(Error::dim(format!(
                    "preconditioner has n = {n}, block vector has n = {}",
                    r.n()
                )));
            }
        }
        match self {
            Self::Identity => z.copy_from(r)?,
            Self::Jacobi(inv) => {
                for (row, &d) in inv.iter().enumerate() {
                    for (dst, &src) in z.row_mut(row).iter_mut().zip(r.row(row)) {
                        *dst = d * src;
                    }
                }
            }
            Self::Ilu0(f) => f.solve_into(r, z),
        }
        Ok(())
    }
}

/// Zero fill-in incomplete LU factors stored on the pattern of `A`.
///
/// Entries left of the diagonal belong to the unit lower factor `L`, the
/// rest to `U`.
#[derive(Debug, Clone)]
pub struct Ilu0 {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    diag: Vec<usize>,
}

impl Ilu0 {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n();
        let row_offsets = a.row_offsets().to_vec();
        let col_indices = a.col_indices().to_vec();
        let mut values = a.values().to_vec();
        let diag = (0..n)
            .map(|r| a.position(r, r).ok_or(Error::Factorization { row: r }))
            .collect::<Result<Vec<_>>>()?;

        // Scratch map from column to position within the current row.
        let mut pos_in_row = vec![usize::MAX; n];
        for i in 0..n {
            let range = row_offsets[i]..row_offsets[i + 1];
            for p in range.clone() {
                pos_in_row[col_indices[p]] = p;
            }
            for p in range.clone() {
                let kcol = col_indices[p];
                if kcol >= i {
                    break;
                }
                let pivot = values[diag[kcol]];
                if pivot == 0.0 || !pivot.is_finite() {
                    return Err(Error::Factorization { row: kcol });
                }
                let lik = values[p] / pivot;
                values[p] = lik;
                for q in diag[kcol] + 1..row_offsets[kcol + 1] {
                    let j = col_indices[q];
                    let target = pos_in_row[j];
                    if target != usize::MAX {
                        values[target] -= lik * values[q];
                    }
                }
            }
            let d = values[diag[i]];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::Factorization { row: i });
            }
            for p in range {
                pos_in_row[col_indices[p]] = usize::MAX;
            }
        }
        Ok(Self {
            n,
            row_offsets,
            col_indices,
            values,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry of `L` (unit diagonal implied) at (r, c), `c < r`.
    pub fn lower(&self, r: usize, c: usize) -> f64 {
        match c.cmp(&r) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => 0.0,
            std::cmp::Ordering::Less => self.stored(r, c),
        }
    }

    /// Entry of `U` at (r, c), `c ≥ r`.
    pub fn upper(&self, r: usize, c: usize) -> f64 {
        if c < r {
            0.0
        } else {
            self.stored(r, c)
        }
    }

    fn stored(&self, r: usize, c: usize) -> f64 {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        self.col_indices[range.clone()]
            .binary_search(&c)
            .map_or(0.0, |i| self.values[range.start + i])
    }

    /// Forward then backward substitution, all lanes of a row at once.
    fn solve_into(&self, r: &BlockVector, z: &mut BlockVector) {
        let k = r.k();
        let mut acc = vec![0.0; k];
        for i in 0..self.n {
            acc.copy_from_slice(r.row(i));
            for p in self.row_offsets[i]..self.diag[i] {
                let l = self.values[p];
                for (a, &y) in acc.iter_mut().zip(z.row(self.col_indices[p])) {
                    *a -= l * y;
                }
            }
            z.row_mut(i).copy_from_slice(&acc);
        }
        for i in (0..self.n).rev() {
            acc.copy_from_slice(z.row(i));
            for p in self.diag[i] + 1..self.row_offsets[i + 1] {
                let u = self.values[p];
                for (a, &x) in acc.iter_mut().zip(z.row(self.col_indices[p])) {
                    *a -= u * x;
                }
            }
            let d = self.values[self.diag[i]];
            for (dst, a) in z.row_mut(i).iter_mut().zip(&acc) {
                *dst = a / d;
            }
        }
    }
}

//! Convergence-rate bounds for classical and global block CG, and a dense
//! symmetric eigensolver to obtain spectra of small operators.

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Largest dimension accepted by [`spectrum_of`].
pub const MAX_DENSE_EIGEN: usize = 2048;

/// Strictly positive eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts the values; rejects empty input and non-positive entries.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::config("empty spectrum"));
        }
        if let Some(v) = eigenvalues.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::config(format!(
                "eigenvalue {v} is not strictly positive"
            )));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self(eigenvalues))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    /// `λ_N / λ_j`, with 1-based `j`.
    pub fn effective_condition(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.len() {
            return Err(Error::config(format!(
                "index {j} outside 1..={}",
                self.len()
            )));
        }
        Ok(self.max() / self.0[j - 1])
    }
}

fn rate_from_condition(kappa: f64) -> f64 {
    let s = kappa.sqrt();
    (s - 1.0) / (s + 1.0)
}

/// Per-column energy-error contraction bound of classical block CG with `k`
/// right-hand sides: `(√κ − 1)/(√κ + 1)` with `κ = λ_N / λ_k`.
pub fn rate_classical(spec: &Spectrum, k: usize) -> Result<f64> {
    Ok(rate_from_condition(spec.effective_condition(k)?))
}

/// Bound for the global method with block width `p` and `q` groups.
///
/// The global method is classical block CG with `p` columns on `q` stacked
/// copies of the operator, whose `p`-th smallest eigenvalue is `λ_⌈p/q⌉`.
/// Hence `κ̂ = λ_N / λ_⌈p/q⌉` and the rate is `(√κ̂ − 1)/(√κ̂ + 1)`.
pub fn rate_global(spec: &Spectrum, p: usize, q: usize) -> Result<f64> {
    if p == 0 || q == 0 {
        return Err(Error::config("p and q must be positive"));
    }
    Ok(rate_from_condition(
        spec.effective_condition(p.div_ceil(q))?,
    ))
}

/// All eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn spectrum_of(a: &SparseMatrix) -> Result<Spectrum> {
    if a.n() > MAX_DENSE_EIGEN {
        return Err(Error::Size {
            n: a.n(),
            limit: MAX_DENSE_EIGEN,
        });
    }
    Spectrum::new(symmetric_eigenvalues(a.to_dense(), a.n()))
}

/// Eigenvalues (unsorted) of a dense symmetric row-major matrix.
pub fn symmetric_eigenvalues(mut m: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(m.len(), n * n);
    let frob: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                let aij = m[i * n + j];
                if aij.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (aii, ajj) = (m[i * n + i], m[j * n + j]);
                let theta = (ajj - aii) / (2.0 * aij);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let (mri, mrj) = (m[r * n + i], m[r * n + j]);
                    m[r * n + i] = c * mri - s * mrj;
                    m[r * n + j] = s * mri + c * mrj;
                }
                for col in 0..n {
                    let (mic, mjc) = (m[i * n + col], m[j * n + col]);
                    m[i * n + col] = c * mic - s * mjc;
                    m[j * n + col] = s * mic + c * mjc;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

//! Test problem generators: the heterogeneous 2D Poisson operator and
//! seeded random right-hand sides.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::linalg::{BlockVector, SparseMatrix};

/// Cell coefficient field of the diffusion operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientField {
    Constant(f64),
    /// `10^u` with `u` uniform in `[-contrast, contrast]`, one value per cell.
    LogUniform {
        contrast: f64,
    },
}

impl Default for CoefficientField {
    fn default() -> Self {
        CoefficientField::LogUniform { contrast: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonSpec {
    pub nx: usize,
    pub ny: usize,
    pub coeff: CoefficientField,
    pub seed: u64,
}

impl PoissonSpec {
    pub fn new(nx: usize, ny: usize, coeff: CoefficientField, seed: u64) -> Result<Self> {
        let spec = Self {
            nx,
            ny,
            coeff,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit coefficients: the standard 5-point Laplacian.
    pub fn constant(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            coeff: CoefficientField::Constant(1.0),
            seed: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::config(format!(
                "grid must be at least 2x2, got {}x{}",
                self.nx, self.ny
            )));
        }
        match self.coeff {
            CoefficientField::Constant(c) if !(c > 0.0 && c.is_finite()) => {
                Err(Error::config("constant coefficient must be positive"))
            }
            CoefficientField::LogUniform { contrast }
                if !(contrast >= 0.0 && contrast.is_finite()) =>
            {
                Err(Error::config("contrast exponent must be non-negative"))
            }
            _ => Ok(()),
        }
    }

    /// Per-cell coefficients, row-major over `(iy, ix)`.
    pub fn cell_coefficients(&self) -> Vec<f64> {
        match self.coeff {
            CoefficientField::Constant(c) => vec![c; self.n()],
            CoefficientField::LogUniform { contrast } => {
                let mut rng = UniformStream::new(self.seed);
                (0..self.n())
                    .map(|_| 10f64.powf(contrast * rng.next_symmetric()))
                    .collect()
            }
        }
    }
}

/// Five-point finite difference operator `−∇·(κ∇u)` with homogeneous
/// Dirichlet boundary, unknowns at cell centres, row index `iy·nx + ix`.
///
/// The flux coefficient on an interior face is the harmonic mean of the two
/// adjacent cells; on a boundary face it is the cell's own value, so each
/// diagonal always collects four face contributions.
pub fn poisson2d(spec: &PoissonSpec) -> Result<SparseMatrix> {
    spec.validate()?;
    let (nx, ny) = (spec.nx, spec.ny);
    let kappa = spec.cell_coefficients();
    let harmonic = |a: f64, b: f64| 2.0 * a * b / (a + b);
    let mut triplets = Vec::with_capacity(5 * nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let row = iy * nx + ix;
            let kc = kappa[row];
            let mut diag = 0.0;
            let neighbours = [
                (ix > 0).then(|| row - 1),
                (ix + 1 < nx).then(|| row + 1),
                (iy > 0).then(|| row - nx),
                (iy + 1 < ny).then(|| row + nx),
            ];
            for nb in neighbours {
                match nb {
                    Some(col) => {
                        let w = harmonic(kc, kappa[col]);
                        diag += w;
                        triplets.push((row, col, -w));
                    }
                    None => diag += kc,
                }
            }
            triplets.push((row, row, diag));
        }
    }
    SparseMatrix::from_triplets(nx * ny, &triplets)
}

/// `n×k` block with entries i.i.d. uniform in `(-1, 1)`.
///
/// Drawn from xoshiro256++ seeded by `seed`, filled in storage order, so the
/// output is identical on every platform.
pub fn random_block_rhs(n: usize, k: usize, seed: u64) -> BlockVector {
    let mut rng = UniformStream::new(seed);
    let data = (0..n * k).map(|_| rng.next_symmetric()).collect();
    BlockVector::from_vec(n, k, data).expect("length is n·k")
}

struct UniformStream(Xoshiro256PlusPlus);

impl UniformStream {
    fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Uniform in `[-1, 1)` from the top 53 bits.
    fn next_symmetric(&mut self) -> f64 {
        let unit = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        2.0 * unit - 1.0
    }
}

//! *-subalgebras of ℝ^{k×k} and their elements.
//!
//! A [`SubalgebraConfig`] fixes the total column count `k`, a block width `p`
//! dividing `k`, and a [`Mode`]. The `k` columns of a block vector are split
//! into `q = k / p` contiguous groups; group `i` holds columns `i·p .. (i+1)·p`.
//!
//! * hybrid: block-diagonal matrices with `q` independent p×p blocks,
//! * global: one p×p block `C`, acting as `C` on every group (`C ⊗ I_q`).
//!
//! `p = k` gives the classical block method (both modes coincide) and
//! `p = 1` in hybrid mode gives `k` simultaneous scalar CG runs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Hybrid,
    Global,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Hybrid => f.write_str("hybrid"),
            Mode::Global => f.write_str("global"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hybrid" => Ok(Mode::Hybrid),
            "global" => Ok(Mode::Global),
            other => Err(Error::config(format!("unknown mode '{other}'"))),
        }
    }
}

/// Selects the subalgebra used for block products and coefficient solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubalgebraConfig {
    k: usize,
    p: usize,
    mode: Mode,
}

impl SubalgebraConfig {
    pub fn new(k: usize, p: usize, mode: Mode) -> Result<Self> {
        if k == 0 || p == 0 {
            return Err(Error::config("k and p must be positive"));
        }
        if !k.is_multiple_of(p) {
            return Err(Error::config(format!("p = {p} does not divide k = {k}")));
        }
        // Both modes coincide at p = k; normalise so equal algebras compare equal.
        let mode = if p == k { Mode::Hybrid } else { mode };
        Ok(Self { k, p, mode })
    }

    /// Full ℝ^{k×k}.
    pub fn classical(k: usize) -> Result<Self> {
        Self::new(k, k, Mode::Hybrid)
    }

    /// Diagonal matrices: independent CG per column.
    pub fn parallel(k: usize) -> Result<Self> {
        Self::new(k, 1, Mode::Hybrid)
    }

    pub fn hybrid(k: usize, p: usize) -> Result<Self> {
        Self::new(k, p, Mode::Hybrid)
    }

    pub fn global(k: usize, p: usize) -> Result<Self> {
        Self::new(k, p, Mode::Global)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of column groups, `k / p`.
    pub fn q(&self) -> usize {
        self.k / self.p
    }

    /// Number of stored p×p blocks in a coefficient.
    pub fn block_count(&self) -> usize {
        match self.mode {
            Mode::Hybrid => self.q(),
            Mode::Global => 1,
        }
    }

    pub fn is_classical(&self) -> bool {
        self.p == self.k
    }

    pub fn is_parallel(&self) -> bool {
        self.p == 1 && self.mode == Mode::Hybrid
    }

    /// Index of the stored block that acts on column group `group`.
    #[inline]
    pub fn block_for_group(&self, group: usize) -> usize {
        match self.mode {
            Mode::Hybrid => group,
            Mode::Global => 0,
        }
    }
}

impl fmt::Display for SubalgebraConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(k={}, p={})", self.mode, self.k, self.p)
    }
}

/// An element of the subalgebra selected by its config.
///
/// Blocks are dense p×p, row-major, stored back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficient {
    config: SubalgebraConfig,
    data: Vec<f64>,
}

impl BlockCoefficient {
    pub fn zeros(config: SubalgebraConfig) -> Self {
        let len = config.block_count() * config.p() * config.p();
        Self {
            config,
            data: vec![0.0; len],
        }
    }

    pub fn identity(config: SubalgebraConfig) -> Self {
        Self::scaled_identity(config, 1.0)
    }

    pub fn scaled_identity(config: SubalgebraConfig, value: f64) -> Self {
        let mut c = Self::zeros(config);
        let p = config.p();
        for b in 0..config.block_count() {
            let block = c.block_mut(b);
            for i in 0..p {
                block[i * p + i] = value;
            }
        }
        c
    }

    /// Builds a coefficient from row-major p×p blocks.
    pub fn from_blocks(config: SubalgebraConfig, blocks: &[Vec<f64>]) -> Result<Self> {
        let pp = config.p() * config.p();
        if blocks.len() != config.block_count() {
            return Err(Error::dim(format!(
                "expected {} blocks, got {}",
                config.block_count(),
                blocks.len()
            )));
        }
        let mut data = Vec::with_capacity(blocks.len() * pp);
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != pp {
                return Err(Error::dim(format!(
                    "block {i} has {} entries, expected {pp}",
                    b.len()
                )));
            }
            data.extend_from_slice(b);
        }
        Ok(Self { config, data })
    }

    pub(crate) fn from_raw(config: SubalgebraConfig, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), config.block_count() * config.p() * config.p());
        Self { config, data }
    }

    pub fn config(&self) -> SubalgebraConfig {
        self.config
    }

    pub fn block_count(&self) -> usize {
        self.config.block_count()
    }

    pub fn block(&self, index: usize) -> &[f64] {
        let pp = self.config.p() * self.config.p();
        &self.data[index * pp..(index + 1) * pp]
    }

    pub fn block_mut(&mut self, index: usize) -> &mut [f64] {
        let pp = self.config.p() * self.config.p();
        &mut self.data[index * pp..(index + 1) * pp]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        let pp = self.config.p() * self.config.p();
        self.data.chunks_exact(pp)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn negated(&self) -> Self {
        Self {
            config: self.config,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    /// Blockwise transpose; equals the k×k transpose of the embedded matrix.
    pub fn transpose(&self) -> Self {
        let p = self.config.p();
        let mut out = Self::zeros(self.config);
        for b in 0..self.block_count() {
            let src = self.block(b);
            let dst = out.block_mut(b);
            for i in 0..p {
                for j in 0..p {
                    dst[j * p + i] = src[i * p + j];
                }
            }
        }
        out
    }

    /// Product in the subalgebra, `self · rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.config != rhs.config {
            return Err(Error::dim("coefficients belong to different subalgebras"));
        }
        let p = self.config.p();
        let mut out = Self::zeros(self.config);
        for b in 0..self.block_count() {
            let (l, r) = (self.block(b), rhs.block(b));
            let dst = out.block_mut(b);
            for i in 0..p {
                for m in 0..p {
                    let lim = l[i * p + m];
                    for j in 0..p {
                        dst[i * p + j] += lim * r[m * p + j];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry over all blocks.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Dense k×k row-major matrix this element represents.
    pub fn to_dense(&self) -> Vec<f64> {
        let (k, p) = (self.config.k(), self.config.p());
        let mut dense = vec![0.0; k * k];
        for g in 0..self.config.q() {
            let block = self.block(self.config.block_for_group(g));
            for i in 0..p {
                for j in 0..p {
                    dense[(g * p + i) * k + g * p + j] = block[i * p + j];
                }
            }
        }
        dense
    }

    /// Restricts a hybrid coefficient to a finer hybrid block width `p_fine`
    /// dividing `p` by keeping only the p_fine×p_fine diagonal sub-blocks.
    pub fn restrict_to(&self, fine: SubalgebraConfig) -> Result<Self> {
        let (p, pf) = (self.config.p(), fine.p());
        if fine.k() != self.config.k()
            || fine.mode() != Mode::Hybrid
            || self.config.mode() != Mode::Hybrid
            || p % pf != 0
        {
            return Err(Error::config(format!(
                "cannot restrict {} to {}",
                self.config, fine
            )));
        }
        let mut out = Self::zeros(fine);
        for g in 0..fine.q() {
            let coarse = self.block(g * pf / p);
            let offset = (g * pf) % p;
            let dst = out.block_mut(g);
            for i in 0..pf {
                for j in 0..pf {
                    dst[i * pf + j] = coarse[(offset + i) * p + offset + j];
                }
            }
        }
        Ok(out)
    }
}

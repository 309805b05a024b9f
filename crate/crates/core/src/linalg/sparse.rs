use crate::error::{Error, Result};

/// Relative tolerance for the value-symmetry check on construction.
pub const SYMMETRY_TOL: f64 = 1e-14;

/// Symmetric sparse matrix in compressed sparse row form.
///
/// Column indices are sorted within each row and unique. Positive
/// definiteness is assumed by the solver but never checked.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validates raw CSR arrays. Rows may arrive unsorted; they are sorted here.
    pub fn new(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 {
            return Err(Error::dim(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::config(
                "row_offsets must start at 0 and be non-decreasing",
            ));
        }
        let z = row_offsets[n];
        if col_indices.len() != z || values.len() != z {
            return Err(Error::dim(format!(
                "expected {z} stored entries, got {} indices and {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if let Some(&c) = col_indices.iter().find(|&&c| c >= n) {
            return Err(Error::dim(format!(
                "column index {c} out of range for n = {n}"
            )));
        }
        let mut m = Self {
            n,
            row_offsets,
            col_indices,
            values,
        };
        m.sort_rows()?;
        m.check_symmetry()?;
        Ok(m)
    }

    /// Assembles from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        if let Some(&(r, c, _)) = sorted.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(Error::dim(format!(
                "entry ({r}, {c}) out of range for n = {n}"
            )));
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0; n + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
                continue;
            }
            last = Some((r, c));
            row_offsets[r + 1] += 1;
            col_indices.push(c);
            values.push(v);
        }
        for r in 0..n {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::new(n, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// `copies` copies of `self` on the diagonal of a larger matrix.
    pub fn block_diagonal(&self, copies: usize) -> Self {
        let z = self.nnz();
        let mut row_offsets = Vec::with_capacity(self.n * copies + 1);
        let mut col_indices = Vec::with_capacity(z * copies);
        let mut values = Vec::with_capacity(z * copies);
        row_offsets.push(0);
        for c in 0..copies {
            for r in 0..self.n {
                let (cols, vals) = self.row(r);
                col_indices.extend(cols.iter().map(|&j| j + c * self.n));
                values.extend_from_slice(vals);
                row_offsets.push(col_indices.len());
            }
        }
        Self {
            n: self.n * copies,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries (`z`).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Stored value at (r, c), or `None` outside the pattern.
    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).ok().map(|i| vals[i])
    }

    /// Position of (r, c) in the value array.
    pub(crate) fn position(&self, r: usize, c: usize) -> Option<usize> {
        let (cols, _) = self.row(r);
        cols.binary_search(&c).ok().map(|i| self.row_offsets[r] + i)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r).unwrap_or(0.0)).collect()
    }

    /// Dense row-major copy; intended for small matrices.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d[r * self.n + c] = v;
            }
        }
        d
    }

    /// Sparse matrix-vector product on a single vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    fn sort_rows(&mut self) -> Result<()> {
        for r in 0..self.n {
            let range = self.row_offsets[r]..self.row_offsets[r + 1];
            let cols = &self.col_indices[range.clone()];
            if cols.windows(2).all(|w| w[0] < w[1]) {
                continue;
            }
            let mut pairs: Vec<(usize, f64)> = cols
                .iter()
                .copied()
                .zip(self.values[range.clone()].iter().copied())
                .collect();
            pairs.sort_by_key(|p| p.0);
            if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::config(format!("duplicate entry in row {r}")));
            }
            for (i, (c, v)) in pairs.into_iter().enumerate() {
                self.col_indices[range.start + i] = c;
                self.values[range.start + i] = v;
            }
        }
        Ok(())
    }

    fn check_symmetry(&self) -> Result<()> {
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c <= r {
                    continue;
                }
                let Some(w) = self.get(c, r) else {
                    return Err(Error::NotSymmetric { row: r, col: c });
                };
                if (v - w).abs() > SYMMETRY_TOL * v.abs().max(w.abs()) {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
            }
        }
        Ok(())
    }
}

use crate::error::{Error, Result};

/// A tall-skinny n×k block of columns.
///
/// Storage is lane-interleaved: the `k` entries of a row are contiguous
/// (`data[row * k + col]`), so kernels sweep all columns per visited row.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn zeros(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            data: vec![0.0; n * k],
        }
    }

    pub fn from_vec(n: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * k {
            return Err(Error::dim(format!(
                "block vector {n}x{k} needs {} entries, got {}",
                n * k,
                data.len()
            )));
        }
        Ok(Self { n, k, data })
    }

    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * k);
        for r in 0..n {
            for c in 0..k {
                data.push(f(r, c));
            }
        }
        Self { n, k, data }
    }

    /// Builds a block from equally long columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::dim("columns differ in length"));
        }
        Ok(Self::from_fn(n, k, |r, c| columns[c][r]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.k + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.k + col] = value;
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.k..(row + 1) * self.k]
    }

    #[inline]
    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.k..(row + 1) * self.k]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.k.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, col)).collect()
    }

    /// Copies columns `start .. start + width` into a new block.
    pub fn columns(&self, start: usize, width: usize) -> BlockVector {
        BlockVector::from_fn(self.n, width, |r, c| self.get(r, start + c))
    }

    /// Writes `block` into columns `start .. start + block.k()`.
    pub fn set_columns(&mut self, start: usize, block: &BlockVector) -> Result<()> {
        if block.n != self.n || start + block.k > self.k {
            return Err(Error::dim("column block does not fit"));
        }
        for r in 0..self.n {
            self.row_mut(r)[start..start + block.k].copy_from_slice(block.row(r));
        }
        Ok(())
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    pub fn copy_from(&mut self, other: &BlockVector) -> Result<()> {
        self.check_same_shape(other)?;
        self.data.copy_from_slice(&other.data);
        Ok(())
    }

    /// `self ← a·self + b·other`, elementwise.
    pub fn axpby(&mut self, a: f64, b: f64, other: &BlockVector) -> Result<()> {
        self.check_same_shape(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x = a * *x + b * y;
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_shape(&self, other: &BlockVector) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::dim(format!(
                "block vectors {}x{} and {}x{} differ in shape",
                self.n, self.k, other.n, other.k
            )));
        }
        Ok(())
    }
}

/// Euclidean norm of every column.
pub fn column_norms(x: &BlockVector) -> Vec<f64> {
    let mut sums = vec![0.0; x.k()];
    for row in x.rows() {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v * v;
        }
    }
    sums.into_iter().map(f64::sqrt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_row_interleaved() {
        let x = BlockVector::from_fn(3, 2, |r, c| (10 * r + c) as f64);
        assert_eq!(x.as_slice(), &[0.0, 1.0, 10.0, 11.0, 20.0, 21.0]);
        assert_eq!(x.column(1), vec![1.0, 11.0, 21.0]);
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(BlockVector::from_vec(2, 3, vec![0.0; 5]).is_err());
    }

    #[test]
    fn norms_of_zero_and_unit_columns() {
        assert_eq!(column_norms(&BlockVector::zeros(5, 3)), vec![0.0; 3]);
        let e = BlockVector::from_fn(6, 4, |r, c| if r == c { 1.0 } else { 0.0 });
        assert_eq!(column_norms(&e), vec![1.0; 4]);
    }

    #[test]
    fn column_slicing_round_trip() {
        let x = BlockVector::from_fn(4, 6, |r, c| (r * 6 + c) as f64);
        let mid = x.columns(2, 3);
        let mut y = BlockVector::zeros(4, 6);
        y.set_columns(2, &mid).unwrap();
        assert_eq!(y.get(3, 4), x.get(3, 4));
        assert_eq!(y.get(3, 5), 0.0);
    }
}

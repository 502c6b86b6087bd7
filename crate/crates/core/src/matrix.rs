//! Validated data matrix and factor pair.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{NmfError, Result};

/// Nonnegative input matrix `X` (m x n) with at least one positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (m, n) = values.dim();
        if m == 0 || n == 0 {
            return Err(NmfError::Dimension(format!("data matrix must be non-empty, got {m}x{n}")));
        }
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(NmfError::Domain(format!("entry ({}, {}) = {v} is not a finite nonnegative value", i + 1, j + 1)));
        }
        if !values.iter().any(|&v| v > 0.0) {
            return Err(NmfError::Domain("data matrix has no positive entry".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.values
    }

    /// Mean of all entries.
    pub fn mean(&self) -> f64 {
        self.values.mean().unwrap_or(0.0)
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Nonnegative factor pair `W` (m x r) and `H` (r x n).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    w: Array2<f64>,
    h: Array2<f64>,
}

impl Factorization {
    pub fn new(w: Array2<f64>, h: Array2<f64>) -> Result<Self> {
        if w.ncols() != h.nrows() {
            return Err(NmfError::Dimension(format!(
                "W has {} columns but H has {} rows",
                w.ncols(),
                h.nrows()
            )));
        }
        if w.ncols() == 0 {
            return Err(NmfError::Rank("factorization rank must be positive".into()));
        }
        if w.iter().chain(h.iter()).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(NmfError::Domain("factors must be finite and nonnegative".into()));
        }
        Ok(Self { w, h })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts(w: Array2<f64>, h: Array2<f64>) -> Self {
        debug_assert_eq!(w.ncols(), h.nrows());
        Self { w, h }
    }

    pub fn w(&self) -> ArrayView2<'_, f64> {
        self.w.view()
    }

    pub fn h(&self) -> ArrayView2<'_, f64> {
        self.h.view()
    }

    pub fn rank(&self) -> usize {
        self.w.ncols()
    }

    pub fn rows(&self) -> usize {
        self.w.nrows()
    }

    pub fn cols(&self) -> usize {
        self.h.ncols()
    }

    pub fn w_column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.w.column(j)
    }

    pub fn h_row(&self, j: usize) -> ArrayView1<'_, f64> {
        self.h.row(j)
    }

    pub fn product(&self) -> Array2<f64> {
        self.w.dot(&self.h)
    }

    pub fn into_parts(self) -> (Array2<f64>, Array2<f64>) {
        (self.w, self.h)
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Array2<f64>, &mut Array2<f64>) {
        (&mut self.w, &mut self.h)
    }

    /// Appends components after the existing ones.
    pub fn append(&self, w_extra: ArrayView2<'_, f64>, h_extra: ArrayView2<'_, f64>) -> Result<Self> {
        let w = ndarray::concatenate(Axis(1), &[self.w.view(), w_extra])
            .map_err(|e| NmfError::Dimension(e.to_string()))?;
        let h = ndarray::concatenate(Axis(0), &[self.h.view(), h_extra])
            .map_err(|e| NmfError::Dimension(e.to_string()))?;
        Self::new(w, h)
    }

    pub(crate) fn check_compatible(&self, x: &DataMatrix) -> Result<()> {
        if self.rows() != x.rows() || self.cols() != x.cols() {
            return Err(NmfError::Dimension(format!(
                "factorization is {}x{} but data is {}x{}",
                self.rows(),
                self.cols(),
                x.rows(),
                x.cols()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_negative_entry() {
        let err = DataMatrix::new(array![[1.0, -1.0], [0.0, 2.0]]).unwrap_err();
        assert!(matches!(err, NmfError::Domain(ref s) if s.contains("(1, 2)")));
    }

    #[test]
    fn rejects_all_zero() {
        assert!(matches!(DataMatrix::new(Array2::zeros((2, 3))), Err(NmfError::Domain(_))));
    }

    #[test]
    fn rejects_empty() {
        assert!(matches!(DataMatrix::new(Array2::zeros((0, 3))), Err(NmfError::Dimension(_))));
    }

    #[test]
    fn factor_shapes_must_agree() {
        let err = Factorization::new(Array2::ones((3, 2)), Array2::ones((3, 4))).unwrap_err();
        assert!(matches!(err, NmfError::Dimension(_)));
    }

    #[test]
    fn append_keeps_prefix() {
        let f = Factorization::new(array![[1.0], [2.0]], array![[3.0, 4.0]]).unwrap();
        let g = f.append(array![[5.0], [6.0]].view(), array![[7.0, 8.0]].view()).unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.w_column(0), f.w_column(0));
        assert_eq!(g.h_row(1), array![7.0, 8.0]);
    }
}

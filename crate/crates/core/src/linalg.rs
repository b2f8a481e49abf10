//! Dense complex matrices used for channel gains, codewords and observations.
//!
//! Codewords and observation blocks are stored as `rows × n` matrices where
//! column `i` is the vector sent or seen at channel use `i`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim, invalid, Result, WiretapError};

/// A finite, non-empty complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMat(DMatrix<Complex64>);

/// Thin singular value decomposition with singular values sorted descending.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows × k` with orthonormal columns.
    pub u: DMatrix<Complex64>,
    /// `k` singular values, descending.
    pub singular_values: Vec<f64>,
    /// `k × cols` with orthonormal rows.
    pub v_h: DMatrix<Complex64>,
}

impl ComplexMat {
    pub fn from_inner(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return dim("matrix must have at least one row and one column");
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(Self(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<Self> {
        if data.len() != rows * cols {
            return dim(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            ));
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return dim("ragged rows");
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(r, c, &flat)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "empty matrix");
        Self(DMatrix::identity(n, n))
    }

    /// Square diagonal matrix with real diagonal entries.
    pub fn diag(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "empty matrix");
        let d = values.iter().map(|&v| Complex64::new(v, 0.0));
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            d,
        )))
    }

    /// `[I_rows | 0]`, the canonical eavesdropper form with identity rotation.
    pub fn selector(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self(DMatrix::from_fn(rows, cols, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.cols() != rhs.rows() {
            return dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            ));
        }
        Ok(Self(&self.0 * &rhs.0))
    }

    pub fn adjoint(&self) -> ComplexMat {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> ComplexMat {
        Self(self.0.map(|z| z * s))
    }

    pub fn add(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.shape() != rhs.shape() {
            return dim("cannot add matrices of different shapes");
        }
        Ok(Self(&self.0 + &rhs.0))
    }

    pub fn sub(&self, rhs: &ComplexMat) -> Result<ComplexMat> {
        if self.shape() != rhs.shape() {
            return dim("cannot subtract matrices of different shapes");
        }
        Ok(Self(&self.0 - &rhs.0))
    }

    /// Sum of squared magnitudes of all entries.
    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn row_norm_sq(&self, r: usize) -> f64 {
        self.0.row(r).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &ComplexMat) -> f64 {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(rhs.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, c: usize) -> ComplexMat {
        Self(self.0.columns(c, 1).into_owned())
    }

    /// Thin SVD, singular values descending (ties keep decomposition order).
    pub fn svd(&self) -> Result<Svd> {
        let svd = self.0.clone().svd(true, true);
        let (u, v_h) = match (svd.u, svd.v_t) {
            (Some(u), Some(v)) => (u, v),
            _ => return Err(WiretapError::Numerical("SVD did not converge".into())),
        };
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
        let k = sv.len();
        let u_sorted = DMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
        let v_sorted = DMatrix::from_fn(k, v_h.ncols(), |r, c| v_h[(order[r], c)]);
        Ok(Svd {
            u: u_sorted,
            singular_values: order.iter().map(|&i| sv[i]).collect(),
            v_h: v_sorted,
        })
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        Ok(self.svd()?.singular_values)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMat {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Extends the orthonormal columns of `thin` to a full unitary basis of
/// `C^rows`, filling with Gram-Schmidt projections of the standard basis.
pub(crate) fn complete_columns(thin: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let rows = thin.nrows();
    let mut basis: Vec<nalgebra::DVector<Complex64>> =
        thin.column_iter().map(|c| c.into_owned()).collect();
    let mut candidate = 0;
    while basis.len() < rows && candidate < rows {
        let mut v = nalgebra::DVector::<Complex64>::zeros(rows);
        v[candidate] = Complex64::new(1.0, 0.0);
        candidate += 1;
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    DMatrix::from_columns(&basis)
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{conj_matrix, re, CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Dense `n x n` complex self-adjoint matrix.
///
/// Construction always hermitizes: the stored matrix is `(M + M*) / 2` with the
/// diagonal forced real, so `a[(i, j)] == conj(a[(j, i)])` holds exactly.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl TryFrom<CMatrix> for HermitianMatrix {
    type Error = Error;
    fn try_from(m: CMatrix) -> Result<Self> {
        HermitianMatrix::from_matrix(m)
    }
}

impl From<HermitianMatrix> for CMatrix {
    fn from(h: HermitianMatrix) -> CMatrix {
        h.m
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix{}", self.m)
    }
}

impl HermitianMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::BadRank { rank: 0, n: 0 });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalFailure("non-finite matrix entry".into()));
        }
        Ok(Self::hermitize(m))
    }

    /// Hermitizes without validation. Callers guarantee a square finite input.
    pub(crate) fn hermitize(m: CMatrix) -> Self {
        let n = m.nrows();
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = re(m[(i, i)].re);
            for j in (i + 1)..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        HermitianMatrix { m: h }
    }

    /// Builds from complex rows given as `(re, im)` pairs.
    pub fn from_complex_rows<R: AsRef<[(f64, f64)]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &(a, b)) in row.iter().enumerate() {
                m[(i, j)] = C64::new(a, b);
            }
        }
        Self::from_matrix(m)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &a) in row.iter().enumerate() {
                m[(i, j)] = re(a);
            }
        }
        Self::from_matrix(m)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        HermitianMatrix { m }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn scalar(n: usize, t: f64) -> Self {
        HermitianMatrix {
            m: CMatrix::identity(n, n) * re(t),
        }
    }

    /// `v v*` (not normalized).
    pub fn outer(v: &CVector) -> Self {
        Self::hermitize(v * v.adjoint())
    }

    /// Orthogonal projection onto the span of orthonormal columns `w`.
    pub fn projector_onto(w: &CMatrix) -> Self {
        Self::hermitize(w * w.adjoint())
    }

    /// `sum_k values[k] * w_k w_k*` for the columns of `w`.
    pub fn from_eigen(w: &CMatrix, values: &[f64]) -> Self {
        let mut scaled = w.clone();
        for (k, &v) in values.iter().enumerate() {
            let mut col = scaled.column_mut(k);
            col *= re(v);
        }
        Self::hermitize(&scaled * w.adjoint())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Eigenvalues in ascending order (no vectors).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Spectral norm, i.e. the largest `|eigenvalue|`.
    pub fn spectral_norm(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Spectral norm of `self - other`.
    pub fn distance(&self, other: &HermitianMatrix) -> f64 {
        (self - other).spectral_norm()
    }

    /// Entrywise conjugate, which equals the transpose for hermitian input.
    pub fn conj(&self) -> Self {
        HermitianMatrix {
            m: conj_matrix(&self.m),
        }
    }

    pub fn transpose(&self) -> Self {
        self.conj()
    }

    /// `T A T*` for an arbitrary square `T` of matching size.
    pub fn congruence(&self, t: &CMatrix) -> Self {
        Self::hermitize(t * &self.m * t.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix { m: &self.m * re(s) }
    }

    pub fn mul_matrix(&self, other: &HermitianMatrix) -> CMatrix {
        &self.m * &other.m
    }

    /// `x* A x`, real for hermitian `A`.
    pub fn quadratic_form(&self, x: &CVector) -> f64 {
        (x.adjoint() * &self.m * x)[(0, 0)].re
    }

    pub fn is_diagonal(&self, eps: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.m[(i, j)].norm() <= eps))
    }

    pub fn same_dim(&self, other: &HermitianMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

impl<'a> Add<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m + &rhs.m }
    }
}

impl<'a> Sub<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix { m: &self.m - &rhs.m }
    }
}

impl Add for HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self + &rhs
    }
}

impl Sub for HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: HermitianMatrix) -> HermitianMatrix {
        &self - &rhs
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        HermitianMatrix { m: -&self.m }
    }
}

impl Neg for HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        -&self
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

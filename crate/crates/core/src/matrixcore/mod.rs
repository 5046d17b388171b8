//! Dense complex hermitian matrices, their spectral calculus, and the
//! tolerance policy shared by every other module.

mod hermitian;
pub mod random;
mod spectral;
mod tolerance;

pub use hermitian::HermitianMatrix;
pub use spectral::{
    eig_hermitian, inv, is_pd, is_psd, min_eigenvalue, rank_tol, spectral_apply,
    spectral_apply_table, sqrt_psd, SpectralDecomposition, SpectralTable,
};
pub use tolerance::Tolerance;
pub(crate) use spectral::apply_to_decomposition;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Standard basis vector `e_i` of length `n`.
pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = re(1.0);
    v
}

/// Entrywise complex conjugate of a vector.
pub fn conj_vector(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

/// Entrywise complex conjugate of a matrix.
pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// Spectral norm (largest singular value) of an arbitrary square matrix.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // Largest eigenvalue of M*M, which is hermitian.
    let gram = m.adjoint() * m;
    let gram = (&gram + gram.adjoint()) * re(0.5);
    gram.symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |acc, &x| acc.max(x))
        .max(0.0)
        .sqrt()
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let gram = (&gram + gram.adjoint()) * re(0.5);
    gram.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
        .max(0.0)
        .sqrt()
}

/// Makes the first component whose modulus exceeds `floor` real and positive.
/// Returns `false` when no such component exists.
pub fn phase_fix(v: &mut CVector, floor: f64) -> bool {
    match v.iter().position(|z| z.norm() > floor) {
        Some(k) => {
            let z = v[k];
            let phase = z / z.norm();
            let inv = phase.conj();
            for x in v.iter_mut() {
                *x *= inv;
            }
            v[k] = re(v[k].re);
            true
        }
        None => false,
    }
}

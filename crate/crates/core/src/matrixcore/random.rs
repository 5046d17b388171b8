//! Seeded random models for every matrix class used by the toolkit.
//!
//! All generators are fully determined by their seed; the `*_with` variants
//! draw from a caller-supplied generator so samplers can be composed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{re, CMatrix, CVector, HermitianMatrix, C64};
use crate::error::{Error, Result};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / re(norm);
        }
    }
}

/// Real unit vector drawn uniformly from the sphere.
pub fn random_real_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| re(rng.sample(StandardNormal)));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / re(norm);
        }
    }
}

/// `(G + G*) / 2` with standard complex gaussian `G`.
pub fn random_hermitian_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::hermitize(gaussian_matrix(n, n, rng))
}

pub fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    random_hermitian_with(n, &mut rng_from_seed(seed))
}

/// Haar unitary: QR of a complex gaussian with the phases of `diag(R)` moved into `Q`.
pub fn random_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { re(1.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    random_unitary_with(n, &mut rng_from_seed(seed))
}

/// Eigenvalues of a random hermitian clipped into `[0, 1]`.
pub fn random_effect_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let h = random_hermitian_with(n, rng);
    let eig = h.matrix().clone().symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    HermitianMatrix::from_eigen(&eig.eigenvectors, &values)
}

pub fn random_effect(n: usize, seed: u64) -> HermitianMatrix {
    random_effect_with(n, &mut rng_from_seed(seed))
}

/// Effect `W diag(u) W*` with Haar `W` and `u` uniform on `[lo, hi]`.
pub fn random_effect_in<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> HermitianMatrix {
    let w = random_unitary_with(n, rng);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    HermitianMatrix::from_eigen(&w, &values)
}

/// Projection onto the span of the first `rank` columns of a Haar unitary.
pub fn random_projection_with<R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> Result<HermitianMatrix> {
    if rank == 0 || rank > n {
        return Err(Error::BadRank { rank, n });
    }
    let u = random_unitary_with(n, rng);
    Ok(HermitianMatrix::projector_onto(&u.columns(0, rank).into_owned()))
}

pub fn random_projection(n: usize, rank: usize, seed: u64) -> Result<HermitianMatrix> {
    random_projection_with(n, rank, &mut rng_from_seed(seed))
}

/// Positive definite `W diag(u) W*` with `u` uniform on `[lo, hi]`, `lo > 0`.
pub fn random_pd_with<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> HermitianMatrix {
    random_effect_in(n, lo, hi, rng)
}

/// Random full-rank state `G G* / tr(G G*)`.
pub fn random_density_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_matrix(n, n, rng);
    let h = HermitianMatrix::hermitize(&g * g.adjoint());
    let t = h.trace();
    h.scale(1.0 / t)
}

/// Invertible `U diag(s) V` with singular values uniform on `[0.5, 2]`.
pub fn random_invertible_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let u = random_unitary_with(n, rng);
    let v = random_unitary_with(n, rng);
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = re(rng.random_range(0.5..=2.0));
    }
    u * d * v
}

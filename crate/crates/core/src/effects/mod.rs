//! The effect algebra `E(H) = {A : 0 <= A <= I}` and its products.

mod coexistence;

pub use coexistence::{
    coexistent, witness_defect, CoexistenceConfig, CoexistenceDecision, CoexistenceWitness, Route,
    Verdict,
};

use crate::error::{Error, Result};
use crate::matrixcore::{eig_hermitian, sqrt_psd, spectral_apply, HermitianMatrix, Tolerance};
use crate::matrixcore::apply_to_decomposition;

/// A hermitian matrix with spectrum in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    m: HermitianMatrix,
}

impl Effect {
    /// Accepts spectra within tolerance of `[0, 1]` and clips them into it.
    pub fn new(m: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        let sd = eig_hermitian(&m, tol)?;
        let (lo, hi) = (sd.min(), sd.max());
        let eps = tol.effective(1.0);
        if lo < -eps || hi > 1.0 + eps {
            return Err(Error::NotAnEffect {
                min_eig: lo,
                max_eig: hi,
            });
        }
        if lo >= 0.0 && hi <= 1.0 {
            return Ok(Effect { m });
        }
        let clipped = apply_to_decomposition(&sd, |x| Some(x.clamp(0.0, 1.0)))?;
        Ok(Effect { m: clipped })
    }

    pub fn zero(n: usize) -> Self {
        Effect {
            m: HermitianMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Effect {
            m: HermitianMatrix::identity(n),
        }
    }

    pub fn scalar(n: usize, t: f64, tol: &Tolerance) -> Result<Self> {
        Effect::new(HermitianMatrix::scalar(n, t), tol)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.m
    }

    /// `I - A`.
    pub fn orthocomplement(&self) -> Effect {
        Effect {
            m: &HermitianMatrix::identity(self.dim()) - &self.m,
        }
    }
}

impl AsRef<HermitianMatrix> for Effect {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.m
    }
}

pub fn orthocomplement(a: &Effect) -> Effect {
    a.orthocomplement()
}

/// `(AB + BA) / 2`.
pub fn jordan_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.same_dim(b)?;
    let s = a.mul_matrix(b) + b.mul_matrix(a);
    Ok(HermitianMatrix::hermitize(s * crate::matrixcore::re(0.5)))
}

/// `ABA`.
pub fn triple_product(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    a.same_dim(b)?;
    Ok(b.congruence(a.matrix()))
}

/// `A^{1/2} B A^{1/2}`.
pub fn sequential_product(a: &Effect, b: &Effect, tol: &Tolerance) -> Result<Effect> {
    a.m.same_dim(&b.m)?;
    let root = sqrt_psd(&a.m, tol)?;
    Effect::new(b.m.congruence(root.matrix()), tol)
}

/// `A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}` for positive definite inputs.
pub fn geometric_mean(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    a.same_dim(b)?;
    for m in [a, b] {
        let lo = crate::matrixcore::min_eigenvalue(m);
        if lo <= tol.effective(m.spectral_norm()) {
            return Err(Error::NotPositiveDefinite { min_eig: lo });
        }
    }
    let sd = eig_hermitian(a, tol)?;
    let root = apply_to_decomposition(&sd, |x| Some(x.sqrt()))?;
    let inv_root = apply_to_decomposition(&sd, |x| Some(1.0 / x.sqrt()))?;
    let inner = b.congruence(inv_root.matrix());
    let inner_root = spectral_apply(&inner, tol, |x| Some(x.max(0.0).sqrt()))?;
    Ok(inner_root.congruence(root.matrix()))
}

/// Spectral diameter within the effective tolerance.
pub fn is_scalar(a: &HermitianMatrix, tol: &Tolerance) -> bool {
    let ev = a.eigenvalues();
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    hi - lo <= tol.effective(lo.abs().max(hi.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::random::{random_effect, random_pd_with, rng_from_seed};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn eff(d: &[f64]) -> Effect {
        Effect::new(HermitianMatrix::diag(d), &tol()).unwrap()
    }

    #[test]
    fn construction_clips_or_rejects() {
        let t = tol();
        let e = Effect::new(HermitianMatrix::diag(&[-1e-12, 1.0 + 1e-12]), &t).unwrap();
        assert_eq!(e.matrix().diagonal(), vec![0.0, 1.0]);
        assert!(matches!(
            Effect::new(HermitianMatrix::diag(&[-0.1, 0.5]), &t),
            Err(Error::NotAnEffect { .. })
        ));
    }

    #[test]
    fn orthocomplement_examples() {
        assert!(orthocomplement(&Effect::zero(2)).matrix().distance(&HermitianMatrix::identity(2)) < 1e-15);
        let half = Effect::scalar(2, 0.5, &tol()).unwrap();
        assert!(orthocomplement(&half).matrix().distance(half.matrix()) < 1e-15);
        let d = orthocomplement(&eff(&[0.3, 0.8]));
        assert!(d.matrix().distance(&HermitianMatrix::diag(&[0.7, 0.2])) < 1e-15);
        let a = Effect::new(random_effect(3, 2), &tol()).unwrap();
        assert!(a.orthocomplement().orthocomplement().matrix().distance(a.matrix()) < 1e-15);
    }

    #[test]
    fn product_examples() {
        let t = tol();
        let p = eff(&[1.0, 0.0]);
        assert!(sequential_product(&p, &p, &t).unwrap().matrix().distance(p.matrix()) < 1e-12);
        let h = Effect::new(HermitianMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap(), &t).unwrap();
        let s = sequential_product(&p, &h, &t).unwrap();
        assert!(s.matrix().distance(&HermitianMatrix::diag(&[0.5, 0.0])) < 1e-12);
        let a = random_effect(3, 4);
        assert!(jordan_product(&a, &HermitianMatrix::identity(3)).unwrap().distance(&a) < 1e-14);
        // triple product with a rank-one P vanishes iff B's image is orthogonal to P
        let e1 = HermitianMatrix::diag(&[1.0, 0.0, 0.0]);
        let b = HermitianMatrix::diag(&[0.0, 0.4, 0.9]);
        assert!(triple_product(&e1, &b).unwrap().spectral_norm() < 1e-15);
        assert!(triple_product(&e1, &a).unwrap().spectral_norm() > 1e-3);
    }

    #[test]
    fn geometric_mean_examples() {
        let t = tol();
        let mut r = rng_from_seed(5);
        let a = random_pd_with(3, 0.2, 2.0, &mut r);
        let b = random_pd_with(3, 0.2, 2.0, &mut r);
        assert!(geometric_mean(&a, &a, &t).unwrap().distance(&a) < 1e-12);
        let g = geometric_mean(&HermitianMatrix::identity(3), &b, &t).unwrap();
        assert!(g.distance(&sqrt_psd(&b, &t).unwrap()) < 1e-12);
        let g = geometric_mean(&HermitianMatrix::diag(&[1.0, 4.0]), &HermitianMatrix::diag(&[4.0, 1.0]), &t).unwrap();
        assert!(g.distance(&HermitianMatrix::diag(&[2.0, 2.0])) < 1e-12);
        assert!(matches!(
            geometric_mean(&HermitianMatrix::diag(&[1.0, 1.0, 0.0]), &b, &t),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(geometric_mean(&HermitianMatrix::diag(&[1.0, 0.5]), &b, &t).is_err());
    }

    #[test]
    fn scalar_examples() {
        let t = tol();
        assert!(is_scalar(&HermitianMatrix::scalar(3, 0.7), &t));
        assert!(!is_scalar(&HermitianMatrix::diag(&[1.0, 0.0]), &t));
        let i = &HermitianMatrix::identity(2) + &HermitianMatrix::diag(&[1e-12, -1e-12]);
        assert!(is_scalar(&i, &t));
    }
}

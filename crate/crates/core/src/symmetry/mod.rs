//! Canonical symmetry forms and a generic preservation verifier.

mod verify;

pub use verify::{
    verify_symmetry, Contract, Counterexample, Domain, PairSampler, VerifyConfig, VerifyReport,
};

use rand::Rng;

use crate::effects::Effect;
use crate::error::{Error, Result};
use crate::matrixcore::random::rng_from_seed;
use crate::matrixcore::{
    eig_hermitian, inv, is_pd, min_singular_value, operator_norm, spectral_apply, CMatrix,
    HermitianMatrix, Tolerance,
};
use crate::orderrel::loewner_le;
use crate::projective::SemilinearOperator;

/// How `SpectralReparam` picks the function `f_A` for an input `A`.
#[derive(Debug, Clone, PartialEq)]
pub enum ReparamPolicy {
    /// The same `f(x) = scale * x + offset` for every input.
    Affine { scale: f64, offset: f64 },
    /// An increasing table that depends on the input's spectrum and the seed.
    SeededMonotone { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryDescriptor {
    /// `A -> c T A T* + S`, with `A` replaced by its transpose when `conjugates`.
    Congruence {
        t: CMatrix,
        conjugates: bool,
        shift: HermitianMatrix,
        sign: f64,
    },
    UnitarySimilarity(SemilinearOperator),
    Transpose,
    SpectralReparam(ReparamPolicy),
    /// The order automorphism of the effect algebra built from `tau`.
    Molnar { t: HermitianMatrix },
    IntervalShift { s: HermitianMatrix },
    IntervalCongruence { s: CMatrix },
    IntervalInvert,
}

impl SymmetryDescriptor {
    pub fn congruence(t: CMatrix, conjugates: bool, shift: HermitianMatrix) -> Self {
        SymmetryDescriptor::Congruence {
            t,
            conjugates,
            shift,
            sign: 1.0,
        }
    }

    /// Structural invariants of the descriptor.
    pub fn validate(&self, tol: &Tolerance) -> Result<()> {
        match self {
            SymmetryDescriptor::Congruence { t, shift, sign, .. } => {
                if t.nrows() != shift.dim() {
                    return Err(Error::DimensionMismatch {
                        left: t.nrows(),
                        right: shift.dim(),
                    });
                }
                let s = min_singular_value(t);
                if s <= tol.effective(operator_norm(t)) {
                    return Err(Error::SingularMatrix { min_abs_eig: s });
                }
                if *sign != 1.0 && *sign != -1.0 {
                    return Err(Error::DomainViolation(format!("sign must be +1 or -1, got {sign}")));
                }
                Ok(())
            }
            SymmetryDescriptor::UnitarySimilarity(u) => {
                let d = u.unitarity_defect();
                if d > tol.effective(1.0) * 10.0 {
                    return Err(Error::DomainViolation(format!("operator is not unitary (defect {d:e})")));
                }
                Ok(())
            }
            SymmetryDescriptor::SpectralReparam(ReparamPolicy::Affine { scale, .. }) if *scale == 0.0 => {
                Err(Error::DomainViolation("reparametrization must be injective".into()))
            }
            SymmetryDescriptor::Molnar { t } => invertible_effect(t, tol).map(|_| ()),
            SymmetryDescriptor::IntervalCongruence { s } => {
                let m = min_singular_value(s);
                if m <= tol.effective(operator_norm(s)) {
                    return Err(Error::SingularMatrix { min_abs_eig: m });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Rejects descriptors that cannot satisfy `contract` by construction.
    pub fn check_contract(&self, contract: Contract) -> Result<()> {
        if let SymmetryDescriptor::Congruence { sign, .. } = self {
            if *sign < 0.0 && contract == Contract::LoewnerOrderIff {
                return Err(Error::IncompatibleContract(
                    "c = -1 reverses the order".into(),
                ));
            }
        }
        if matches!(self, SymmetryDescriptor::IntervalInvert) && contract == Contract::LoewnerOrderIff {
            return Err(Error::IncompatibleContract("inversion reverses the order".into()));
        }
        Ok(())
    }

    pub fn apply(&self, a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
        match self {
            SymmetryDescriptor::Congruence {
                t,
                conjugates,
                shift,
                sign,
            } => {
                a.same_dim(shift)?;
                let x = if *conjugates { a.conj() } else { a.clone() };
                Ok(&x.congruence(t).scale(*sign) + shift)
            }
            SymmetryDescriptor::UnitarySimilarity(u) => {
                if u.dim() != a.dim() {
                    return Err(Error::DimensionMismatch {
                        left: u.dim(),
                        right: a.dim(),
                    });
                }
                Ok(u.act_on(a))
            }
            SymmetryDescriptor::Transpose => Ok(a.transpose()),
            SymmetryDescriptor::SpectralReparam(policy) => reparametrize(policy, a, tol),
            SymmetryDescriptor::Molnar { t } => {
                let te = Effect::new(t.clone(), tol)?;
                let ae = Effect::new(a.clone(), tol)
                    .map_err(|_| Error::DomainViolation("Molnar map needs an effect".into()))?;
                Ok(molnar_automorphism(&te, &ae, tol)?.into_matrix())
            }
            SymmetryDescriptor::IntervalShift { s } => {
                a.same_dim(s)?;
                Ok(a + s)
            }
            SymmetryDescriptor::IntervalCongruence { s } => Ok(a.congruence(s)),
            SymmetryDescriptor::IntervalInvert => {
                if !is_pd(a, tol) {
                    return Err(Error::DomainViolation("inversion needs a positive definite input".into()));
                }
                inv(a, tol)
            }
        }
    }
}

fn spectrum_key(values: &[f64]) -> u64 {
    values.iter().fold(0xcbf2_9ce4_8422_2325, |h, v| {
        let q = (v * 1e6).round() as i64 as u64;
        (h ^ q).wrapping_mul(0x100_0000_01b3)
    })
}

fn reparametrize(policy: &ReparamPolicy, a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    match policy {
        ReparamPolicy::Affine { scale, offset } => spectral_apply(a, tol, |x| Some(scale * x + offset)),
        ReparamPolicy::SeededMonotone { seed } => {
            let sd = eig_hermitian(a, tol)?;
            let means = sd.cluster_values();
            let mut rng = rng_from_seed(seed ^ spectrum_key(&means));
            let mut mapped = Vec::with_capacity(means.len());
            for (k, &m) in means.iter().enumerate() {
                let v = if k == 0 {
                    m + rng.random_range(-0.5..0.5)
                } else {
                    mapped[k - 1] + (m - means[k - 1]) * rng.random_range(0.5..2.0)
                };
                mapped.push(v);
            }
            let mut values = vec![0.0; sd.dim()];
            for (k, r) in sd.clusters.iter().enumerate() {
                for i in r.clone() {
                    values[i] = mapped[k];
                }
            }
            Ok(HermitianMatrix::from_eigen(&sd.eigenvectors, &values))
        }
    }
}

/// Spectrum of `T` must lie in `(0, 1]`.
fn invertible_effect(t: &HermitianMatrix, tol: &Tolerance) -> Result<Effect> {
    let e = Effect::new(t.clone(), tol).map_err(|_| Error::NotInvertibleEffect)?;
    if !is_pd(e.matrix(), tol) {
        return Err(Error::NotInvertibleEffect);
    }
    Ok(e)
}

/// `tau(A) = (I - T^2 + T (I + A)^{-1} T)^{-1} - I`.
pub fn molnar_tau(t: &Effect, a: &Effect, tol: &Tolerance) -> Result<Effect> {
    invertible_effect(t.matrix(), tol)?;
    t.matrix().same_dim(a.matrix())?;
    let n = a.dim();
    let id = HermitianMatrix::identity(n);
    let tm = t.matrix();
    let t2 = HermitianMatrix::hermitize(tm.mul_matrix(tm));
    let inner = inv(&(&id + a.matrix()), tol)?.congruence(tm.matrix());
    let outer = inv(&(&(&id - &t2) + &inner), tol)?;
    Effect::new(&outer - &id, tol)
}

/// `D = T^2 (2I - T^2)^{-1}`, which equals `tau(I)`.
pub fn molnar_d(t: &Effect, tol: &Tolerance) -> Result<HermitianMatrix> {
    invertible_effect(t.matrix(), tol)?;
    spectral_apply(t.matrix(), tol, |x| Some(x * x / (2.0 - x * x)))
}

/// `D^{-1/2} tau(A) D^{-1/2}`, an order automorphism of the effects.
pub fn molnar_automorphism(t: &Effect, a: &Effect, tol: &Tolerance) -> Result<Effect> {
    let tau = molnar_tau(t, a, tol)?;
    let d_inv_root = spectral_apply(t.matrix(), tol, |x| Some((2.0 - x * x).sqrt() / x))?;
    Effect::new(tau.matrix().congruence(d_inv_root.matrix()), tol)
}

/// `tau` as the chain of interval maps `A -> I + A -> inverse -> T . T ->
/// + (I - T^2) -> inverse -> - I`, each step checked against its interval.
pub fn molnar_tau_by_composition(t: &Effect, a: &Effect, tol: &Tolerance) -> Result<HermitianMatrix> {
    invertible_effect(t.matrix(), tol)?;
    let n = a.dim();
    let id = HermitianMatrix::identity(n);
    let tm = t.matrix();
    let t2 = HermitianMatrix::hermitize(tm.mul_matrix(tm));
    let steps = [
        SymmetryDescriptor::IntervalShift { s: id.clone() },
        SymmetryDescriptor::IntervalInvert,
        SymmetryDescriptor::IntervalCongruence { s: tm.matrix().clone() },
        SymmetryDescriptor::IntervalShift { s: &id - &t2 },
        SymmetryDescriptor::IntervalInvert,
        SymmetryDescriptor::IntervalShift { s: -&id },
    ];
    let mut x = a.matrix().clone();
    let (mut lo, mut hi) = (HermitianMatrix::zeros(n), id.clone());
    for step in &steps {
        x = interval_map(step, &x, &lo, &hi, tol)?;
        (lo, hi) = interval_endpoints(step, &lo, &hi, tol)?;
    }
    Ok(x)
}

/// Image of `[E, F]`; inversion swaps the endpoints.
pub fn interval_endpoints(
    d: &SymmetryDescriptor,
    e: &HermitianMatrix,
    f: &HermitianMatrix,
    tol: &Tolerance,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    match d {
        SymmetryDescriptor::IntervalInvert => {
            check_pd(e, tol)?;
            Ok((inv(f, tol)?, inv(e, tol)?))
        }
        _ => Ok((d.apply(e, tol)?, d.apply(f, tol)?)),
    }
}

fn check_pd(e: &HermitianMatrix, tol: &Tolerance) -> Result<()> {
    if !is_pd(e, tol) {
        return Err(Error::NotPositiveDefinite {
            min_eig: crate::matrixcore::min_eigenvalue(e),
        });
    }
    Ok(())
}

/// Applies an interval map to `A` in `[E, F]`.
pub fn interval_map(
    d: &SymmetryDescriptor,
    a: &HermitianMatrix,
    e: &HermitianMatrix,
    f: &HermitianMatrix,
    tol: &Tolerance,
) -> Result<HermitianMatrix> {
    match d {
        SymmetryDescriptor::IntervalShift { .. }
        | SymmetryDescriptor::IntervalCongruence { .. }
        | SymmetryDescriptor::IntervalInvert => {}
        _ => return Err(Error::DomainViolation("not an interval map".into())),
    }
    if !(loewner_le(e, a, tol)? && loewner_le(a, f, tol)?) {
        return Err(Error::OutOfInterval);
    }
    if matches!(d, SymmetryDescriptor::IntervalInvert) {
        check_pd(e, tol)?;
        return inv(a, tol);
    }
    d.apply(a, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::random::{random_effect_in, random_effect_with, random_hermitian, random_unitary};
    use crate::matrixcore::{c, re};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn congruence_example() {
        let t = tol();
        let d = SymmetryDescriptor::congruence(
            CMatrix::identity(3, 3) * re(2f64.sqrt()),
            false,
            HermitianMatrix::identity(3),
        );
        d.validate(&t).unwrap();
        let a = random_hermitian(3, 1);
        let want = &a.scale(2.0) + &HermitianMatrix::identity(3);
        assert!(d.apply(&a, &t).unwrap().distance(&want) < 1e-12);
    }

    #[test]
    fn transpose_example() {
        let a = HermitianMatrix::from_complex_rows(&[[(1.0, 0.0), (0.0, 1.0)], [(0.0, -1.0), (2.0, 0.0)]]).unwrap();
        let b = SymmetryDescriptor::Transpose.apply(&a, &tol()).unwrap();
        assert_eq!(b.get(0, 1), c(0.0, -1.0));
        assert_eq!(b.get(1, 0), c(0.0, 1.0));
    }

    #[test]
    fn unitary_similarity_keeps_rank_one() {
        let t = tol();
        let u = SemilinearOperator::new(random_unitary(3, 2), false, &t).unwrap();
        let p = crate::matrixcore::random::random_projection(3, 1, 3).unwrap();
        let q = SymmetryDescriptor::UnitarySimilarity(u).apply(&p, &t).unwrap();
        assert!((q.trace() - 1.0).abs() < 1e-12);
        assert_eq!(crate::matrixcore::rank_tol(&q, &t), 1);
    }

    #[test]
    fn sign_checked_against_contract() {
        let d = SymmetryDescriptor::Congruence {
            t: CMatrix::identity(2, 2),
            conjugates: false,
            shift: HermitianMatrix::zeros(2),
            sign: -1.0,
        };
        assert!(matches!(d.check_contract(Contract::LoewnerOrderIff), Err(Error::IncompatibleContract(_))));
        assert!(d.check_contract(Contract::AdjacencyIff).is_ok());
    }

    #[test]
    fn tau_examples() {
        let tl = tol();
        let mut r = rng_from_seed(4);
        let t = Effect::new(random_effect_in(3, 0.2, 1.0, &mut r), &tl).unwrap();
        assert!(molnar_tau(&t, &Effect::zero(3), &tl).unwrap().matrix().spectral_norm() < 1e-12);
        let d = molnar_d(&t, &tl).unwrap();
        assert!(molnar_tau(&t, &Effect::identity(3), &tl).unwrap().matrix().distance(&d) < 1e-12);
        let a = Effect::new(random_effect_with(3, &mut r), &tl).unwrap();
        let same = molnar_tau(&Effect::identity(3), &a, &tl).unwrap();
        assert!(same.matrix().distance(a.matrix()) < 1e-12);
    }

    #[test]
    fn molnar_endpoints_and_identity_case() {
        let tl = tol();
        let mut r = rng_from_seed(5);
        let t = Effect::new(random_effect_in(4, 0.1, 1.0, &mut r), &tl).unwrap();
        assert!(molnar_automorphism(&t, &Effect::zero(4), &tl).unwrap().matrix().spectral_norm() < 1e-9);
        let top = molnar_automorphism(&t, &Effect::identity(4), &tl).unwrap();
        assert!(top.matrix().distance(&HermitianMatrix::identity(4)) < 1e-9);
        for _ in 0..20 {
            let a = Effect::new(random_effect_with(4, &mut r), &tl).unwrap();
            let b = molnar_automorphism(&Effect::identity(4), &a, &tl).unwrap();
            assert!(b.matrix().distance(a.matrix()) < 1e-12);
        }
        assert!(matches!(
            molnar_tau(&Effect::new(HermitianMatrix::diag(&[1.0, 0.0]), &tl).unwrap(), &Effect::zero(2), &tl),
            Err(Error::NotInvertibleEffect)
        ));
    }

    #[test]
    fn interval_examples() {
        let t = tol();
        let a = HermitianMatrix::diag(&[1.0, 2.0]);
        let e = HermitianMatrix::scalar(2, 0.5);
        let f = HermitianMatrix::scalar(2, 3.0);
        let inv_a = interval_map(&SymmetryDescriptor::IntervalInvert, &a, &e, &f, &t).unwrap();
        assert!(inv_a.distance(&HermitianMatrix::diag(&[1.0, 0.5])) < 1e-14);
        let (lo, hi) = interval_endpoints(&SymmetryDescriptor::IntervalInvert, &e, &f, &t).unwrap();
        assert!(lo.distance(&HermitianMatrix::scalar(2, 1.0 / 3.0)) < 1e-14);
        assert!(hi.distance(&HermitianMatrix::scalar(2, 2.0)) < 1e-14);
        let shift = SymmetryDescriptor::IntervalShift { s: HermitianMatrix::identity(2) };
        assert!(interval_map(&shift, &a, &e, &f, &t).unwrap().distance(&(&a + &HermitianMatrix::identity(2))) < 1e-15);
        assert!(matches!(
            interval_map(&shift, &HermitianMatrix::scalar(2, 4.0), &e, &f, &t),
            Err(Error::OutOfInterval)
        ));
        let i2 = HermitianMatrix::identity(2);
        let big = HermitianMatrix::scalar(2, 2.0);
        let x = interval_map(&SymmetryDescriptor::IntervalInvert, &i2, &i2, &big, &t).unwrap();
        let y = interval_map(&SymmetryDescriptor::IntervalInvert, &big, &i2, &big, &t).unwrap();
        assert!(loewner_le(&y, &x, &t).unwrap() && !loewner_le(&x, &y, &t).unwrap());
    }

    #[test]
    fn seeded_reparam_is_monotone_and_deterministic() {
        let t = tol();
        let d = SymmetryDescriptor::SpectralReparam(ReparamPolicy::SeededMonotone { seed: 9 });
        let a = random_hermitian(4, 6);
        let b = d.apply(&a, &t).unwrap();
        assert_eq!(b, d.apply(&a, &t).unwrap());
        assert!(crate::commutant::commutant_equal(&a, &b, &t).unwrap().equal);
    }
}

//! Loewner order, adjacency and the betweenness witness for non-adjacent pairs.

use crate::effects::Effect;
use crate::error::{Error, Result};
use crate::matrixcore::{eig_hermitian, is_psd, rank_tol, HermitianMatrix, Tolerance};
use crate::projective::Projection;

fn scaled(tol: &Tolerance, a: &HermitianMatrix, b: &HermitianMatrix) -> Tolerance {
    let norm = a.spectral_norm().max(b.spectral_norm()).max(1.0);
    Tolerance {
        atol: tol.effective(norm),
        rtol: 0.0,
        ..*tol
    }
}

/// `A <= B`, i.e. `B - A` is positive semidefinite.
pub fn loewner_le(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    a.same_dim(b)?;
    Ok(is_psd(&(b - a), &scaled(tol, a, b)))
}

/// Either order holds; boundary cases count as comparable.
pub fn comparable(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(loewner_le(a, b, tol)? || loewner_le(b, a, tol)?)
}

/// `B - A` has rank one.
pub fn is_adjacent(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    a.same_dim(b)?;
    Ok(rank_tol(&(b - a), &scaled(tol, a, b)) == 1)
}

#[derive(Debug, Clone)]
pub struct DaggerVerdict {
    pub adjacent: bool,
    pub comparable: bool,
    /// Two mutually incomparable matrices between comparable, non-adjacent inputs.
    pub witness: Option<(HermitianMatrix, HermitianMatrix)>,
}

impl DaggerVerdict {
    /// No refutation found: the inputs are comparable and no witness exists.
    pub fn satisfies_dagger(&self) -> bool {
        self.comparable && self.witness.is_none()
    }
}

/// For comparable `A <= B` with `rank(B - A) >= 2`, returns
/// `(A + pP, A + qQ)` built from the top two eigenpairs of `B - A`.
pub fn dagger_check(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<DaggerVerdict> {
    a.same_dim(b)?;
    let t = scaled(tol, a, b);
    if a.distance(b) <= t.atol {
        return Err(Error::EqualInputs);
    }
    let adjacent = is_adjacent(a, b, tol)?;
    let (lo, hi) = if loewner_le(a, b, tol)? {
        (a, b)
    } else if loewner_le(b, a, tol)? {
        (b, a)
    } else {
        return Ok(DaggerVerdict {
            adjacent,
            comparable: false,
            witness: None,
        });
    };
    let witness = if adjacent {
        None
    } else {
        let sd = eig_hermitian(&(hi - lo), &t)?;
        let n = sd.dim();
        let pick = |k: usize| lo + &HermitianMatrix::outer(&sd.eigenvector(k)).scale(sd.eigenvalues[k]);
        let (c, d) = (pick(n - 1), pick(n - 2));
        debug_assert!(loewner_le(lo, &c, tol)? && loewner_le(&c, hi, tol)?);
        debug_assert!(!comparable(&c, &d, tol)?);
        Some((c, d))
    };
    Ok(DaggerVerdict {
        adjacent,
        comparable: true,
        witness,
    })
}

/// Two incomparable sub-effects of `A` when `rank A >= 2`.
pub fn comparability_cone_witness(
    a: &Effect,
    tol: &Tolerance,
) -> Result<Option<(HermitianMatrix, HermitianMatrix)>> {
    let m = a.matrix();
    if rank_tol(m, tol) < 2 {
        return Ok(None);
    }
    let sd = eig_hermitian(m, tol)?;
    let n = sd.dim();
    let pick = |k: usize| HermitianMatrix::outer(&sd.eigenvector(k)).scale(sd.eigenvalues[k]);
    Ok(Some((pick(n - 1), pick(n - 2))))
}

/// `max{t in [0, 1] : tP <= A}` by bisection on the psd test.
pub fn max_scalar_below(a: &Effect, p: &Projection, tol: &Tolerance) -> Result<f64> {
    a.matrix().same_dim(p.matrix())?;
    if p.rank() != 1 {
        return Err(Error::NotRankOneProjection);
    }
    let (am, pm) = (a.matrix(), p.matrix());
    let fits = |t: f64| is_psd(&(am - &pm.scale(t)), tol);
    if fits(1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iters = 0;
    while hi - lo > tol.atol && iters < 200 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    Ok(lo)
}

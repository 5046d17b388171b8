use crate::error::{Error, Result};
use crate::matrixcore::{
    conj_vector, eig_hermitian, phase_fix, rank_tol, re, CMatrix, CVector, HermitianMatrix,
    Tolerance, C64,
};

/// A one-dimensional subspace `[x]`, stored as a unit vector whose first
/// component above the phase floor is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    v: CVector,
}

impl ProjectivePoint {
    pub fn new(v: CVector, tol: &Tolerance) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm <= tol.atol.max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroVector);
        }
        let mut v = v / re(norm);
        phase_fix(&mut v, tol.phase_floor());
        Ok(ProjectivePoint { v })
    }

    pub fn from_components(components: &[C64], tol: &Tolerance) -> Result<Self> {
        Self::new(CVector::from_column_slice(components), tol)
    }

    /// `[e_i]`.
    pub fn basis(n: usize, i: usize) -> Self {
        ProjectivePoint {
            v: crate::matrixcore::basis_vector(n, i),
        }
    }

    /// Ray spanned by the range of a rank-one projection (or of any rank-one
    /// positive matrix).
    pub fn from_projector(p: &HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        if rank_tol(p, tol) != 1 {
            return Err(Error::NotRankOneProjection);
        }
        let sd = eig_hermitian(p, tol)?;
        let top = if sd.max().abs() >= sd.min().abs() {
            sd.dim() - 1
        } else {
            0
        };
        Self::new(sd.eigenvector(top), tol)
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.v
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::outer(&self.v)
    }

    /// `|<x, y>|^2`, the transition probability between the two pure states.
    pub fn overlap(&self, other: &ProjectivePoint) -> f64 {
        self.v.dotc(&other.v).norm_sqr().min(1.0)
    }

    /// Spectral-norm distance of the two projectors, `sqrt(1 - |<x, y>|^2)`,
    /// evaluated as the norm of the component of `x` orthogonal to `y`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let r = &self.v - &other.v * other.v.dotc(&self.v);
        r.norm().min(1.0)
    }

    /// Ray of the entrywise conjugate vector.
    pub fn conj(&self, tol: &Tolerance) -> Self {
        Self::new(conj_vector(&self.v), tol).expect("conjugate of a unit vector is nonzero")
    }
}

pub fn projector_of(p: &ProjectivePoint) -> HermitianMatrix {
    p.projector()
}

fn check_rank_one_projection(p: &HermitianMatrix, tol: &Tolerance) -> Result<()> {
    if !is_projection(p, tol) || rank_tol(p, tol) != 1 {
        return Err(Error::NotRankOneProjection);
    }
    Ok(())
}

/// `tr(PQ)` for rank-one projections.
pub fn transition_probability(
    p: &HermitianMatrix,
    q: &HermitianMatrix,
    tol: &Tolerance,
) -> Result<f64> {
    p.same_dim(q)?;
    check_rank_one_projection(p, tol)?;
    check_rank_one_projection(q, tol)?;
    let pq = p.mul_matrix(q);
    Ok(pq.trace().re.clamp(0.0, 1.0))
}

pub fn orthogonal(p: &HermitianMatrix, q: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(transition_probability(p, q, tol)? <= tol.effective(1.0))
}

/// Whether `[x]` lies in `[y] + [z]`.
pub fn collinear(x: &ProjectivePoint, y: &ProjectivePoint, z: &ProjectivePoint, tol: &Tolerance) -> bool {
    let n = x.dim();
    if y.dim() != n || z.dim() != n {
        return false;
    }
    let eps = tol.effective(1.0).sqrt().max(tol.atol);
    let mut cols = CMatrix::zeros(n, 3);
    cols.set_column(0, y.vector());
    cols.set_column(1, z.vector());
    cols.set_column(2, x.vector());
    let sv = cols.singular_values();
    let rank = sv.iter().filter(|&&s| s > eps).count();
    if rank > 2 {
        return false;
    }
    // Residual of x after projecting onto an orthonormal basis of span{y, z}.
    let mut basis: Vec<CVector> = vec![y.vector().clone()];
    let w = z.vector() - y.vector() * y.vector().dotc(z.vector());
    if w.norm() > eps {
        basis.push(&w / re(w.norm()));
    }
    let mut r = x.vector().clone();
    for b in &basis {
        r -= b * b.dotc(&r);
    }
    r.norm() <= eps
}

/// Complete orthogonal system: pairwise orthogonal and exactly `n` points.
pub fn cosp_check(points: &[ProjectivePoint], tol: &Tolerance) -> bool {
    let Some(first) = points.first() else {
        return false;
    };
    let n = first.dim();
    if points.len() != n || points.iter().any(|p| p.dim() != n) {
        return false;
    }
    let eps = tol.effective(1.0);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].overlap(&points[j]) > eps {
                return false;
            }
        }
    }
    true
}

/// `P^2 = P` within the effective tolerance.
pub fn is_projection(p: &HermitianMatrix, tol: &Tolerance) -> bool {
    let sq = HermitianMatrix::hermitize(p.mul_matrix(p));
    let defect = sq.distance(p);
    defect <= tol.effective(p.spectral_norm()) * 10.0
}

/// An orthogonal projection `P = P* = P^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    m: HermitianMatrix,
    rank: usize,
}

impl Projection {
    pub fn new(m: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        let sq = HermitianMatrix::hermitize(m.mul_matrix(&m));
        let defect = sq.distance(&m);
        if defect > tol.effective(m.spectral_norm()) * 10.0 {
            return Err(Error::NotAProjection { defect });
        }
        let rank = m.trace().round().max(0.0) as usize;
        Ok(Projection { m, rank })
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            m: HermitianMatrix::zeros(n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            m: HermitianMatrix::identity(n),
            rank: n,
        }
    }

    /// Projection onto the span of orthonormal columns.
    pub fn onto(w: &CMatrix) -> Self {
        Projection {
            m: HermitianMatrix::projector_onto(w),
            rank: w.ncols(),
        }
    }

    pub fn from_point(p: &ProjectivePoint) -> Self {
        Projection {
            m: p.projector(),
            rank: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.m
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 || self.rank == self.dim()
    }

    /// `I - P`.
    pub fn complement(&self) -> Projection {
        Projection {
            m: &HermitianMatrix::identity(self.dim()) - &self.m,
            rank: self.dim() - self.rank,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrixcore::c;
    use crate::matrixcore::random::{random_unit_vector, rng_from_seed};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pt(v: &[C64]) -> ProjectivePoint {
        ProjectivePoint::from_components(v, &tol()).unwrap()
    }

    #[test]
    fn point_canonical_form() {
        let t = tol();
        let mut r = rng_from_seed(1);
        let v = random_unit_vector(3, &mut r);
        let p = ProjectivePoint::new(v.clone(), &t).unwrap();
        let q = ProjectivePoint::new(v * c(0.0, -2.5), &t).unwrap();
        assert!((p.vector() - q.vector()).norm() < 1e-14);
        assert_eq!(ProjectivePoint::new(CVector::zeros(3), &t), Err(Error::ZeroVector));
    }

    #[test]
    fn transition_probability_examples() {
        let t = tol();
        let e1 = ProjectivePoint::basis(2, 0).projector();
        let e2 = ProjectivePoint::basis(2, 1).projector();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let d = pt(&[c(s, 0.0), c(s, 0.0)]).projector();
        assert!((transition_probability(&e1, &e1, &t).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(transition_probability(&e1, &e2, &t).unwrap(), 0.0);
        assert!((transition_probability(&e1, &d, &t).unwrap() - 0.5).abs() < 1e-15);
        assert!(orthogonal(&e1, &e2, &t).unwrap());
        assert!(!orthogonal(&e1, &d, &t).unwrap());
        assert_eq!(
            transition_probability(&HermitianMatrix::identity(2), &e1, &t),
            Err(Error::NotRankOneProjection)
        );
    }

    #[test]
    fn collinearity_examples() {
        let t = tol();
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let e1 = pt(&[l, o, o]);
        let e2 = pt(&[o, l, o]);
        let e3 = pt(&[o, o, l]);
        let e12 = pt(&[l, l, o]);
        assert!(collinear(&e12, &e1, &e2, &t));
        assert!(!collinear(&e3, &e1, &e2, &t));
        assert!(collinear(&e1, &e1, &e1, &t));
        assert!(!collinear(&e2, &e1, &e1, &t));
    }

    #[test]
    fn cosp_examples() {
        let t = tol();
        let basis: Vec<_> = (0..3).map(|i| ProjectivePoint::basis(3, i)).collect();
        assert!(cosp_check(&basis, &t));
        assert!(!cosp_check(&basis[..2], &t));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let pair = vec![
            ProjectivePoint::basis(2, 0),
            pt(&[c(s, 0.0), c(s, 0.0)]),
        ];
        assert!(!cosp_check(&pair, &t));
        assert!(!cosp_check(&[], &t));
    }

    #[test]
    fn projection_type() {
        let t = tol();
        let p = Projection::new(HermitianMatrix::diag(&[1.0, 1.0, 0.0]), &t).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.complement().rank(), 1);
        assert!(!p.is_trivial());
        assert!(Projection::new(HermitianMatrix::diag(&[0.5, 0.0]), &t).is_err());
        assert!(Projection::zero(3).is_trivial());
    }

    #[test]
    fn from_projector_recovers_ray() {
        let t = tol();
        let mut r = rng_from_seed(8);
        let v = random_unit_vector(4, &mut r);
        let p = ProjectivePoint::new(v, &t).unwrap();
        let back = ProjectivePoint::from_projector(&p.projector().scale(3.0), &t).unwrap();
        assert!(p.distance(&back) < 1e-12);
        assert!(ProjectivePoint::from_projector(&HermitianMatrix::identity(2), &t).is_err());
    }
}

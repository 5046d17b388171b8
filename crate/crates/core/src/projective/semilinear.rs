use crate::error::{Error, Result};
use crate::matrixcore::random::{random_unit_vector, rng_from_seed};
use crate::matrixcore::{
    basis_vector, c, conj_matrix, conj_vector, min_singular_value, operator_norm, re, CMatrix,
    CVector, HermitianMatrix, Tolerance, C64,
};

use super::gleason::{gleason_fit, tomography_family, FrameSample};
use super::ProjectivePoint;

/// An invertible linear (`x -> Mx`) or conjugate-linear (`x -> M conj(x)`) map.
#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearOperator {
    matrix: CMatrix,
    conjugates: bool,
}

impl SemilinearOperator {
    pub fn new(matrix: CMatrix, conjugates: bool, tol: &Tolerance) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let smin = min_singular_value(&matrix);
        if smin <= tol.effective(operator_norm(&matrix)) {
            return Err(Error::SingularMatrix { min_abs_eig: smin });
        }
        Ok(SemilinearOperator { matrix, conjugates })
    }

    pub fn identity(n: usize) -> Self {
        SemilinearOperator {
            matrix: CMatrix::identity(n, n),
            conjugates: false,
        }
    }

    /// Entrywise conjugation `x -> conj(x)`.
    pub fn conjugation(n: usize) -> Self {
        SemilinearOperator {
            matrix: CMatrix::identity(n, n),
            conjugates: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn conjugates(&self) -> bool {
        self.conjugates
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        if self.conjugates {
            &self.matrix * conj_vector(x)
        } else {
            &self.matrix * x
        }
    }

    pub fn apply_point(&self, p: &ProjectivePoint, tol: &Tolerance) -> Result<ProjectivePoint> {
        ProjectivePoint::new(self.apply(p.vector()), tol)
    }

    /// `T A T*`; for conjugate-linear `T` this is `M conj(A) M*`.
    pub fn act_on(&self, a: &HermitianMatrix) -> HermitianMatrix {
        if self.conjugates {
            a.conj().congruence(&self.matrix)
        } else {
            a.congruence(&self.matrix)
        }
    }

    /// Inverse of [`act_on`](Self::act_on).
    pub fn act_on_inverse(&self, b: &HermitianMatrix) -> Result<HermitianMatrix> {
        let minv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMatrix { min_abs_eig: 0.0 })?;
        let back = b.congruence(&minv);
        Ok(if self.conjugates { back.conj() } else { back })
    }

    /// `|| M* M - I ||`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        operator_norm(&(self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)))
    }

    /// `|tr(M* N)|`; equals `n` for unitaries that agree up to a global phase.
    pub fn gauge_overlap(&self, other: &SemilinearOperator) -> f64 {
        (self.matrix.adjoint() * &other.matrix).trace().norm()
    }

    pub fn scaled(&self, s: C64) -> SemilinearOperator {
        SemilinearOperator {
            matrix: &self.matrix * s,
            conjugates: self.conjugates,
        }
    }

    /// Multiplies by a unimodular scalar so that the first entry of the first
    /// column above `floor` is real and positive.
    pub fn normalize_gauge(&self, floor: f64) -> SemilinearOperator {
        let col = self.matrix.column(0);
        match col.iter().find(|z| z.norm() > floor) {
            Some(z) => self.scaled((*z / z.norm()).conj()),
            None => self.clone(),
        }
    }

    /// Conjugates the matrix and flips nothing else: `x -> conj(M) x`.
    pub fn conj_matrix(&self) -> CMatrix {
        conj_matrix(&self.matrix)
    }
}

/// Probe and verification policy for reconstruction from black-box oracles.
#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub tol: Tolerance,
    /// Largest accepted verification residual.
    pub verify_tol: f64,
    /// Number of fresh random verification points.
    pub probes: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            tol: Tolerance::default(),
            verify_tol: 1e-6,
            probes: 100,
            seed: 0,
        }
    }
}

impl ProbeConfig {
    pub fn with_seed(seed: u64) -> Self {
        ProbeConfig {
            seed,
            ..Default::default()
        }
    }

    /// Seed for verification probes, distinct from the caller's own streams.
    pub(crate) fn verification_seed(&self) -> u64 {
        self.seed ^ 0x9e37_79b9_7f4a_7c15
    }
}

#[derive(Debug, Clone)]
pub struct SemilinearFit {
    pub operator: SemilinearOperator,
    /// Worst projector distance between oracle output and the fitted action.
    pub residual: f64,
    pub probes: usize,
}

fn sum_point(n: usize, i: usize, j: usize, coef: C64, tol: &Tolerance) -> Result<ProjectivePoint> {
    let v = basis_vector(n, i) + basis_vector(n, j) * coef;
    ProjectivePoint::new(v, tol)
}

/// Least-squares coefficients of `w` in span{a, b} and the residual norm.
fn two_term_fit(w: &CVector, a: &CVector, b: &CVector) -> (C64, C64, f64) {
    let g11 = a.dotc(a);
    let g12 = a.dotc(b);
    let g21 = b.dotc(a);
    let g22 = b.dotc(b);
    let r1 = a.dotc(w);
    let r2 = b.dotc(w);
    let det = g11 * g22 - g12 * g21;
    if det.norm() < 1e-300 {
        return (c(0.0, 0.0), c(0.0, 0.0), w.norm());
    }
    let alpha = (g22 * r1 - g12 * r2) / det;
    let beta = (g11 * r2 - g21 * r1) / det;
    let resid = (w - a * alpha - b * beta).norm();
    (alpha, beta, resid)
}

/// Recovers the semilinear map inducing a projective action from the images
/// of the basis rays, the rays `[e_1 + e_j]`, and the ray `[e_1 + i e_2]`.
/// The operator is fixed up to a scalar: its first column is the unit
/// representative of the image of `[e_1]`.
pub(crate) fn induced_operator<F>(oracle: &mut F, n: usize, cfg: &ProbeConfig) -> Result<SemilinearOperator>
where
    F: FnMut(&ProjectivePoint) -> Result<ProjectivePoint>,
{
    let tol = &cfg.tol;
    let delta = cfg.verify_tol;
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let img = oracle(&ProjectivePoint::basis(n, i))?;
        if img.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: img.dim(),
            });
        }
        images.push(img.vector().clone());
    }
    let mut columns = vec![images[0].clone()];
    for j in 1..n {
        let w = oracle(&sum_point(n, 0, j, re(1.0), tol)?)?;
        let (alpha, beta, resid) = two_term_fit(w.vector(), &images[0], &images[j]);
        if resid > delta {
            return Err(Error::not_in_class("collinearity of [e1 + ej]", resid));
        }
        if alpha.norm() < delta || beta.norm() < delta {
            return Err(Error::not_in_class(
                "image of [e1 + ej] degenerates",
                alpha.norm().min(beta.norm()),
            ));
        }
        columns.push(&images[j] * (beta / alpha));
    }

    let mut conjugates = false;
    if n >= 2 {
        let w = oracle(&sum_point(n, 0, 1, c(0.0, 1.0), tol)?)?;
        let (alpha, beta, resid) = two_term_fit(w.vector(), &columns[0], &columns[1]);
        if resid > delta || alpha.norm() < delta {
            return Err(Error::not_in_class("collinearity of [e1 + i e2]", resid));
        }
        let ratio = beta / alpha;
        let to_linear = (ratio - c(0.0, 1.0)).norm();
        let to_conj = (ratio + c(0.0, 1.0)).norm();
        if to_linear <= delta {
            conjugates = false;
        } else if to_conj <= delta {
            conjugates = true;
        } else {
            return Err(Error::not_in_class(
                "field automorphism is neither identity nor conjugation",
                to_linear.min(to_conj),
            ));
        }
    }

    let matrix = CMatrix::from_columns(&columns);
    SemilinearOperator::new(matrix, conjugates, tol)
        .map_err(|_| Error::not_in_class("induced map is singular", 0.0))
}

/// Compares the oracle with the ray action of `op` on fresh random points.
pub(crate) fn verify_projective_action<F>(
    oracle: &mut F,
    op: &SemilinearOperator,
    n: usize,
    cfg: &ProbeConfig,
) -> Result<f64>
where
    F: FnMut(&ProjectivePoint) -> Result<ProjectivePoint>,
{
    let mut rng = rng_from_seed(cfg.verification_seed());
    let mut worst = 0.0_f64;
    for _ in 0..cfg.probes {
        let p = ProjectivePoint::new(random_unit_vector(n, &mut rng), &cfg.tol)?;
        let got = oracle(&p)?;
        let want = op.apply_point(&p, &cfg.tol)?;
        worst = worst.max(got.distance(&want));
    }
    if worst > cfg.verify_tol {
        return Err(Error::not_in_class("verification", worst));
    }
    Ok(worst)
}

/// Recovers a unitary or antiunitary `U` with `oracle([x]) = [Ux]`.
///
/// For `n = 2` every map is collinearity preserving, so acceptance rests on
/// the verification probes agreeing with a unitary ray action.
pub fn semilinear_reconstruct<F>(oracle: &mut F, n: usize, cfg: &ProbeConfig) -> Result<SemilinearFit>
where
    F: FnMut(&ProjectivePoint) -> Result<ProjectivePoint>,
{
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    cfg.tol.check_dim(n)?;
    let op = induced_operator(oracle, n, cfg)?;
    let defect = op.unitarity_defect();
    if defect > cfg.verify_tol {
        return Err(Error::not_in_class("unitarity", defect));
    }
    let op = op.normalize_gauge(cfg.tol.phase_floor());
    let residual = verify_projective_action(oracle, &op, n, cfg)?;
    Ok(SemilinearFit {
        operator: op,
        residual,
        probes: cfg.probes,
    })
}

#[derive(Debug, Clone)]
pub struct OptimalWignerFit {
    pub fit: SemilinearFit,
    /// Smallest `tr(E_Q Q)` over the probe points.
    pub min_gleason_trace: f64,
    /// Largest `||E_Q - Q||` over the probe points.
    pub max_frame_deviation: f64,
    pub gleason_probes: usize,
}

/// Reconstruction for maps that only send orthogonal pairs to orthogonal
/// pairs. For every probe `Q` the frame function `P -> tr(phi(Q) phi(P))` is
/// fitted to a density `E_Q`; `tr(E_Q Q) = 1` forces `E_Q = Q`, so transition
/// probabilities are preserved and the unitary reconstruction applies.
pub fn optimal_wigner_reconstruct<F>(
    oracle: &mut F,
    n: usize,
    cfg: &ProbeConfig,
) -> Result<OptimalWignerFit>
where
    F: FnMut(&ProjectivePoint) -> Result<ProjectivePoint>,
{
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, min: 3 });
    }
    cfg.tol.check_dim(n)?;
    let family = tomography_family(n);
    let images = family
        .iter()
        .map(&mut *oracle)
        .collect::<Result<Vec<_>>>()?;

    let mut probes: Vec<(ProjectivePoint, ProjectivePoint)> =
        family.iter().cloned().zip(images.iter().cloned()).collect();
    let mut rng = rng_from_seed(cfg.seed ^ 0x6c65_6173_6f6e);
    for _ in 0..8 {
        let q = ProjectivePoint::new(random_unit_vector(n, &mut rng), &cfg.tol)?;
        let img = oracle(&q)?;
        probes.push((q, img));
    }

    let mut min_trace = f64::INFINITY;
    let mut max_dev = 0.0_f64;
    for (q, img_q) in &probes {
        let sample = FrameSample::new(
            family
                .iter()
                .zip(&images)
                .map(|(p, img_p)| (p.clone(), img_q.overlap(img_p)))
                .collect(),
        );
        let e_q = gleason_fit(&sample, n, &cfg.tol).map_err(|e| match e {
            Error::InconsistentSample { residual } => Error::not_in_class("gleason fit", residual),
            other => other,
        })?;
        let tr = e_q.quadratic_form(q.vector());
        min_trace = min_trace.min(tr);
        if tr < 1.0 - cfg.verify_tol {
            return Err(Error::not_in_class("tr(E_Q Q) = 1", 1.0 - tr));
        }
        let dev = e_q.distance(&q.projector());
        max_dev = max_dev.max(dev);
        if dev > cfg.verify_tol {
            return Err(Error::not_in_class("E_Q = Q", dev));
        }
    }

    let fit = semilinear_reconstruct(oracle, n, cfg)?;
    Ok(OptimalWignerFit {
        fit,
        min_gleason_trace: min_trace,
        max_frame_deviation: max_dev,
        gleason_probes: probes.len(),
    })
}

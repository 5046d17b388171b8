//! Recovering canonical parameters of symmetries from black-box oracles.
//!
//! Every reconstructor queries a fixed probe family, fits the canonical
//! form, and then checks the fit on fresh random inputs. A successful result
//! certifies agreement on those probes only.

mod commutativity;

pub use commutativity::{
    hermitian_commutativity_reconstruct, proj_commutativity_reconstruct, CommutativityConfig,
    Pairing, PairingReport, ProbeTable,
};

use crate::effects::Effect;
use crate::error::{Error, Result};
use crate::matrixcore::random::{
    random_effect_with, random_hermitian_with, random_unit_vector, rng_from_seed,
};
use crate::matrixcore::{eig_hermitian, min_eigenvalue, rank_tol, re, HermitianMatrix, Tolerance};
use crate::orderrel::{loewner_le, max_scalar_below};
use crate::projective::{
    induced_operator, semilinear_reconstruct, ProbeConfig, ProjectivePoint, Projection,
};
use crate::symmetry::SymmetryDescriptor;

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub descriptor: SymmetryDescriptor,
    /// Worst deviation between oracle and descriptor on the verification set.
    pub residual: f64,
    /// Number of verification inputs.
    pub probes: usize,
}

/// The ray `y` when `D = t yy*` with `t != 0`: then `{x : x* D x = 0}` is the
/// hyperplane orthogonal to `y`.
pub fn isotropic_hyperplane(d: &HermitianMatrix, tol: &Tolerance) -> Option<ProjectivePoint> {
    if rank_tol(d, tol) != 1 {
        return None;
    }
    ProjectivePoint::from_projector(d, tol).ok()
}

fn relative_distance(x: &HermitianMatrix, y: &HermitianMatrix) -> f64 {
    x.distance(y) / x.spectral_norm().max(y.spectral_norm()).max(1.0)
}

/// Image of a rank-one positive matrix as a ray, after checking its shape.
fn rank_one_positive_ray(img: &HermitianMatrix, tol: &Tolerance, stage: &str) -> Result<ProjectivePoint> {
    let scale = img.spectral_norm().max(1.0);
    let t = Tolerance {
        atol: tol.effective(scale),
        rtol: 0.0,
        ..*tol
    };
    if rank_tol(img, &t) != 1 || min_eigenvalue(img) < -t.atol {
        let ev = img.eigenvalues();
        let second = if ev.len() > 1 { ev[ev.len() - 2].abs().max(ev[0].abs()) } else { 0.0 };
        return Err(Error::not_in_class(stage, second));
    }
    ProjectivePoint::from_projector(img, &t).map_err(|_| Error::not_in_class(stage, 0.0))
}

/// Order automorphisms of the hermitian matrices: `A -> T A T* + S` or
/// `A -> T A^t T* + S`.
pub fn order_auto_reconstruct<F>(oracle: &mut F, n: usize, cfg: &ProbeConfig) -> Result<ReconstructionResult>
where
    F: FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let tol = &cfg.tol;
    tol.check_dim(n)?;
    let s = oracle(&HermitianMatrix::zeros(n))?;
    if s.dim() != n {
        return Err(Error::DimensionMismatch { left: n, right: s.dim() });
    }
    let top = oracle(&HermitianMatrix::identity(n))?;
    if !loewner_le(&s, &top, tol)? || top.distance(&s) <= tol.effective(1.0) {
        return Err(Error::not_in_class("orientation phi(0) <= phi(I)", min_eigenvalue(&(&top - &s))));
    }

    let mut point_oracle = |p: &ProjectivePoint| -> Result<ProjectivePoint> {
        let img = &oracle(&p.projector())? - &s;
        rank_one_positive_ray(&img, tol, "rank-one positive images")
    };
    let v = induced_operator(&mut point_oracle, n, cfg)?.normalize_gauge(tol.phase_floor());

    let mut traces = Vec::with_capacity(n);
    for i in 0..n {
        let img = &oracle(&ProjectivePoint::basis(n, i).projector())? - &s;
        traces.push(img.trace());
    }
    let col0 = v.matrix().column(0).norm();
    let t_hat = v.scaled(re(traces[0].max(0.0).sqrt() / col0));
    for (i, &ti) in traces.iter().enumerate() {
        let got = t_hat.matrix().column(i).norm_squared();
        let dev = (got - ti).abs() / ti.abs().max(1.0);
        if dev > cfg.verify_tol {
            return Err(Error::not_in_class("column scaling", dev));
        }
    }
    let descriptor = SymmetryDescriptor::Congruence {
        t: t_hat.matrix().clone(),
        conjugates: t_hat.conjugates(),
        shift: s,
        sign: 1.0,
    };

    let mut rng = rng_from_seed(cfg.verification_seed());
    let mut worst = 0.0_f64;
    for _ in 0..cfg.probes {
        let a = random_hermitian_with(n, &mut rng);
        worst = worst.max(relative_distance(&oracle(&a)?, &descriptor.apply(&a, tol)?));
    }
    if worst > cfg.verify_tol {
        return Err(Error::not_in_class("verification", worst));
    }
    Ok(ReconstructionResult {
        descriptor,
        residual: worst,
        probes: cfg.probes,
    })
}

/// Ortho-order automorphisms of the effects: `A -> U A U*` with `U` unitary
/// or antiunitary.
pub fn effect_ortho_order_reconstruct<F>(oracle: &mut F, n: usize, cfg: &ProbeConfig) -> Result<ReconstructionResult>
where
    F: FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let tol = &cfg.tol;
    tol.check_dim(n)?;
    for (label, t) in [("phi(0) = 0", 0.0), ("phi(I) = I", 1.0), ("phi(I/2) = I/2", 0.5)] {
        let x = HermitianMatrix::scalar(n, t);
        let dev = oracle(&x)?.distance(&x);
        if dev > cfg.verify_tol {
            return Err(Error::not_in_class(label, dev));
        }
    }

    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..50 {
        let p = HermitianMatrix::outer(&random_unit_vector(n, &mut rng));
        let img = oracle(&p)?;
        let proj = Projection::new(img.clone(), tol).map_err(|e| match e {
            Error::NotAProjection { defect } => Error::not_in_class("rank-one projections preserved", defect),
            other => other,
        })?;
        if proj.rank() != 1 || rank_tol(&img, tol) != 1 {
            return Err(Error::not_in_class("rank-one projections preserved", proj.rank() as f64));
        }
    }

    let mut point_oracle = |p: &ProjectivePoint| -> Result<ProjectivePoint> {
        let img = oracle(&p.projector())?;
        rank_one_positive_ray(&img, tol, "rank-one projections preserved")
    };
    let fit = semilinear_reconstruct(&mut point_oracle, n, cfg)?;
    let descriptor = SymmetryDescriptor::UnitarySimilarity(fit.operator);

    let mut vrng = rng_from_seed(cfg.verification_seed());
    let mut worst = fit.residual;
    for _ in 0..cfg.probes {
        let a = random_effect_with(n, &mut vrng);
        worst = worst.max(oracle(&a)?.distance(&descriptor.apply(&a, tol)?));
    }
    for _ in 0..10 {
        let a = Effect::new(random_effect_with(n, &mut vrng), tol)?;
        let p = Projection::new(HermitianMatrix::outer(&random_unit_vector(n, &mut vrng)), tol)?;
        let fa = Effect::new(oracle(a.matrix())?, tol).map_err(|_| Error::not_in_class("effects preserved", 0.0))?;
        let fp = Projection::new(oracle(p.matrix())?, tol).map_err(|_| Error::not_in_class("projections preserved", 0.0))?;
        let dev = (max_scalar_below(&a, &p, tol)? - max_scalar_below(&fa, &fp, tol)?).abs();
        worst = worst.max(dev);
    }
    if worst > cfg.verify_tol {
        return Err(Error::not_in_class("verification", worst));
    }
    Ok(ReconstructionResult {
        descriptor,
        residual: worst,
        probes: cfg.probes,
    })
}

/// Eigenvalues of `a` split into clusters; used to pick separated probes.
pub(crate) fn min_cluster_gap(a: &HermitianMatrix, tol: &Tolerance) -> Result<f64> {
    let ev = eig_hermitian(a, tol)?.eigenvalues;
    Ok(ev.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

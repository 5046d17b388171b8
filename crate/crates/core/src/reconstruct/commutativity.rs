use rand::Rng;

use super::{min_cluster_gap, ReconstructionResult};
use crate::commutant::{bicommutant_rank_one_test, canonical_representative, commutant_equal, commutator_norm};
use crate::effects::is_scalar;
use crate::error::{Error, Result};
use crate::matrixcore::random::{random_hermitian_with, random_projection_with, rng_from_seed};
use crate::matrixcore::{eig_hermitian, HermitianMatrix, SpectralTable, Tolerance};
use crate::projective::{semilinear_reconstruct, ProbeConfig, ProjectivePoint, Projection};
use crate::symmetry::SymmetryDescriptor;

#[derive(Debug, Clone)]
pub struct CommutativityConfig {
    pub probe: ProbeConfig,
    /// Random partners per image in the rank-one classification.
    pub rank_one_trials: usize,
    /// Random eig_cluster-separated probes that receive an `f_A` table.
    pub table_probes: usize,
    /// Additional probes, used as given.
    pub extra_probes: Vec<HermitianMatrix>,
}

impl Default for CommutativityConfig {
    fn default() -> Self {
        CommutativityConfig {
            probe: ProbeConfig::default(),
            rank_one_trials: 4,
            table_probes: 20,
            extra_probes: Vec::new(),
        }
    }
}

impl CommutativityConfig {
    pub fn with_seed(seed: u64) -> Self {
        CommutativityConfig {
            probe: ProbeConfig::with_seed(seed),
            ..Default::default()
        }
    }
}

/// How the oracle image of a verification projection relates to `U Q U*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    Direct,
    Complemented,
}

#[derive(Debug, Clone, Default)]
pub struct PairingReport {
    pub pairings: Vec<Pairing>,
}

impl PairingReport {
    pub fn direct(&self) -> usize {
        self.pairings.iter().filter(|p| **p == Pairing::Direct).count()
    }

    pub fn complemented(&self) -> usize {
        self.pairings.len() - self.direct()
    }
}

/// The function `f_A` found on one probe, as an eigenvalue table.
#[derive(Debug, Clone)]
pub struct ProbeTable {
    pub probe: HermitianMatrix,
    pub table: SpectralTable,
}

fn image_projection<F>(oracle: &mut F, p: &HermitianMatrix, tol: &Tolerance) -> Result<Projection>
where
    F: FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let img = oracle(p)?;
    if img.dim() != p.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: img.dim() });
    }
    Projection::new(img, tol).map_err(|e| match e {
        Error::NotAProjection { defect } => Error::not_in_class("image is a projection", defect),
        other => other,
    })
}

/// Commutativity preservers of the projection lattice:
/// `{P, I - P} -> {U P U*, I - U P U*}` with `U` unitary or antiunitary.
pub fn proj_commutativity_reconstruct<F>(
    oracle: &mut F,
    n: usize,
    cfg: &CommutativityConfig,
) -> Result<(ReconstructionResult, PairingReport)>
where
    F: FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, min: 3 });
    }
    let pc = &cfg.probe;
    let tol = &pc.tol;
    tol.check_dim(n)?;
    for x in [HermitianMatrix::zeros(n), HermitianMatrix::identity(n)] {
        let img = image_projection(oracle, &x, tol)?;
        if !img.is_trivial() {
            return Err(Error::not_in_class("trivial projections preserved", img.rank() as f64));
        }
    }
    for i in 0..n {
        let img = image_projection(oracle, &ProjectivePoint::basis(n, i).projector(), tol)?;
        if img.is_trivial() {
            return Err(Error::not_in_class("nontrivial projections preserved", 0.0));
        }
        if !bicommutant_rank_one_test(&img, cfg.rank_one_trials, pc.seed + i as u64, tol)? {
            return Err(Error::not_in_class("rank-one classes preserved", img.rank() as f64));
        }
    }

    let mut point_oracle = |p: &ProjectivePoint| -> Result<ProjectivePoint> {
        let img = canonical_representative(&image_projection(oracle, &p.projector(), tol)?);
        if img.rank() != 1 {
            return Err(Error::not_in_class("rank-one classes preserved", img.rank() as f64));
        }
        ProjectivePoint::from_projector(img.matrix(), tol)
    };
    let fit = semilinear_reconstruct(&mut point_oracle, n, pc)?;
    let u = fit.operator;

    let id = HermitianMatrix::identity(n);
    let mut rng = rng_from_seed(pc.verification_seed());
    let mut worst = fit.residual;
    let mut report = PairingReport::default();
    for _ in 0..pc.probes {
        let r = rng.random_range(1..n);
        let q = random_projection_with(n, r, &mut rng)?;
        let got = oracle(&q)?;
        let want = u.act_on(&q);
        let direct = got.distance(&want);
        let comp = got.distance(&(&id - &want));
        if direct <= comp {
            report.pairings.push(Pairing::Direct);
            worst = worst.max(direct);
        } else {
            report.pairings.push(Pairing::Complemented);
            worst = worst.max(comp);
        }
    }
    if worst > pc.verify_tol {
        return Err(Error::not_in_class("verification", worst));
    }
    Ok((
        ReconstructionResult {
            descriptor: SymmetryDescriptor::UnitarySimilarity(u),
            residual: worst,
            probes: pc.probes,
        },
        report,
    ))
}

fn separated_probe<R: Rng>(n: usize, rng: &mut R, tol: &Tolerance) -> Result<HermitianMatrix> {
    let mut a = random_hermitian_with(n, rng);
    for _ in 0..10 {
        if min_cluster_gap(&a, tol)? > 100.0 * tol.eig_cluster {
            break;
        }
        a = random_hermitian_with(n, rng);
    }
    Ok(a)
}

/// Commutativity preservers of the hermitian matrices:
/// `A -> U f_A(A) U*` with `U` unitary or antiunitary and `f_A` injective on
/// the spectrum of `A`.
pub fn hermitian_commutativity_reconstruct<F>(
    oracle: &mut F,
    n: usize,
    cfg: &CommutativityConfig,
) -> Result<(ReconstructionResult, Vec<ProbeTable>)>
where
    F: FnMut(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, min: 3 });
    }
    let pc = &cfg.probe;
    let tol = &pc.tol;
    tol.check_dim(n)?;
    for t in [0.0, 1.0, -1.0, 2.5] {
        let img = oracle(&HermitianMatrix::scalar(n, t))?;
        if img.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: img.dim() });
        }
        if !is_scalar(&img, tol) {
            let ev = img.eigenvalues();
            return Err(Error::not_in_class("scalars preserved", ev[n - 1] - ev[0]));
        }
    }

    // a projection has commutant equal to that of its image, whose top
    // eigenspace is again one of {U P U*, I - U P U*}
    let mut proj_oracle = |p: &HermitianMatrix| -> Result<HermitianMatrix> {
        let img = oracle(p)?;
        if img.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: img.dim() });
        }
        let sd = eig_hermitian(&img, tol)?;
        let rank = crate::matrixcore::rank_tol(p, tol);
        let expected = if rank == 0 || rank == n { 1 } else { 2 };
        if sd.clusters.len() != expected {
            return Err(Error::not_in_class("two-point spectra preserved", sd.clusters.len() as f64));
        }
        if expected == 1 {
            return Ok(if rank == 0 { HermitianMatrix::zeros(n) } else { HermitianMatrix::identity(n) });
        }
        Ok(sd.cluster_projector(sd.clusters.len() - 1))
    };
    let (base, _) = proj_commutativity_reconstruct(&mut proj_oracle, n, cfg)?;
    let u = match &base.descriptor {
        SymmetryDescriptor::UnitarySimilarity(u) => u.clone(),
        _ => unreachable!("projection reconstruction returns a unitary similarity"),
    };

    let mut rng = rng_from_seed(pc.seed ^ 0x7461_626c_6573);
    let mut probes = Vec::with_capacity(cfg.table_probes + cfg.extra_probes.len());
    for _ in 0..cfg.table_probes {
        probes.push(separated_probe(n, &mut rng, tol)?);
    }
    probes.extend(cfg.extra_probes.iter().cloned());

    let mut worst = base.residual;
    let mut tables = Vec::with_capacity(probes.len());
    for a in probes {
        let b = u.act_on_inverse(&oracle(&a)?)?;
        let comm = commutator_norm(&a, &b)? / b.spectral_norm().max(1.0);
        let cert = commutant_equal(&a, &b, tol).map_err(|e| match e {
            Error::NonSeparableSpectrum { gap } => Error::not_in_class("f_A injective on probe", gap),
            other => other,
        })?;
        match cert.table {
            Some(table) if cert.equal => {
                worst = worst.max(comm);
                tables.push(ProbeTable { probe: a, table });
            }
            _ => return Err(Error::not_in_class("f_A injective on probe", comm)),
        }
    }
    if worst > pc.verify_tol {
        return Err(Error::not_in_class("verification", worst));
    }
    let probes_used = base.probes + tables.len();
    Ok((
        ReconstructionResult {
            descriptor: SymmetryDescriptor::UnitarySimilarity(u),
            residual: worst,
            probes: probes_used,
        },
        tables,
    ))
}

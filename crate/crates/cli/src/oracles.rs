//! Built-in ground truths with hidden parameters, and adversarial maps that
//! lie outside each reconstruction class.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use symlab::matrixcore::random::{random_hermitian_with, random_invertible_with, random_unitary_with, rng_from_seed};
use symlab::matrixcore::{CMatrix, HermitianMatrix, Tolerance};
use symlab::projective::{ProjectivePoint, SemilinearOperator};
use symlab::symmetry::SymmetryDescriptor;
use symlab::Result;

use crate::error::CliError;

pub type MatrixOracle = Box<dyn Fn(&HermitianMatrix) -> Result<HermitianMatrix> + Send + Sync>;
pub type PointOracle = Box<dyn Fn(&ProjectivePoint) -> Result<ProjectivePoint> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassId {
    OrderAuto,
    EffectOrtho,
    ProjCommute,
    HermCommute,
    Wigner,
    OptimalWigner,
}

impl ClassId {
    pub const ALL: [ClassId; 6] = [
        ClassId::OrderAuto,
        ClassId::EffectOrtho,
        ClassId::ProjCommute,
        ClassId::HermCommute,
        ClassId::Wigner,
        ClassId::OptimalWigner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassId::OrderAuto => "order-auto",
            ClassId::EffectOrtho => "effect-ortho",
            ClassId::ProjCommute => "proj-commute",
            ClassId::HermCommute => "herm-commute",
            ClassId::Wigner => "wigner",
            ClassId::OptimalWigner => "optimal-wigner",
        }
    }

    pub fn parse(s: &str) -> std::result::Result<Self, CliError> {
        ClassId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown class `{s}`")))
    }

    pub fn adversaries(self) -> &'static [&'static str] {
        match self {
            ClassId::OrderAuto => &["order-reversing", "square", "constant", "scrambled"],
            ClassId::EffectOrtho => &["order-reversing", "square", "constant", "scrambled"],
            ClassId::ProjCommute => &["noncommuting-swap", "constant", "halve", "scrambled", "zero"],
            ClassId::HermCommute => &["constant", "nonscalar-shift", "mixed-unitary", "scrambled", "perturb"],
            ClassId::Wigner | ClassId::OptimalWigner => &["constant", "scrambled", "collapse"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleSpec {
    Hidden,
    Adversarial(String),
}

impl OracleSpec {
    pub fn parse(s: &str, class: ClassId) -> std::result::Result<Self, CliError> {
        if s == "hidden" {
            return Ok(OracleSpec::Hidden);
        }
        match s.strip_prefix("adversarial:") {
            Some(name) if class.adversaries().contains(&name) => Ok(OracleSpec::Adversarial(name.to_string())),
            _ => Err(CliError::Usage(format!(
                "oracle spec `{s}` is not `hidden` or one of {}",
                class.adversaries().iter().map(|a| format!("adversarial:{a}")).collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}

/// Hidden parameters, kept for the comparison against the recovered ones.
#[derive(Debug, Clone)]
pub enum Truth {
    Congruence { t: CMatrix, conjugates: bool, shift: HermitianMatrix },
    Unitary(SemilinearOperator),
    /// `A -> U (2A + I) U*`.
    UnitaryAffine(SemilinearOperator),
}

impl Truth {
    pub fn generate(class: ClassId, n: usize, seed: u64, tol: &Tolerance) -> Result<Truth> {
        let mut rng = rng_from_seed(seed);
        let conjugates = seed % 2 == 1;
        Ok(match class {
            ClassId::OrderAuto => Truth::Congruence {
                t: random_invertible_with(n, &mut rng),
                conjugates,
                shift: random_hermitian_with(n, &mut rng),
            },
            ClassId::HermCommute => Truth::UnitaryAffine(SemilinearOperator::new(random_unitary_with(n, &mut rng), conjugates, tol)?),
            _ => Truth::Unitary(SemilinearOperator::new(random_unitary_with(n, &mut rng), conjugates, tol)?),
        })
    }

    pub fn operator(&self) -> Option<&SemilinearOperator> {
        match self {
            Truth::Unitary(u) | Truth::UnitaryAffine(u) => Some(u),
            Truth::Congruence { .. } => None,
        }
    }

    pub fn matrix_oracle(&self, tol: Tolerance) -> MatrixOracle {
        match self.clone() {
            Truth::Congruence { t, conjugates, shift } => {
                let d = SymmetryDescriptor::congruence(t, conjugates, shift);
                Box::new(move |a| d.apply(a, &tol))
            }
            Truth::Unitary(u) => Box::new(move |a| Ok(u.act_on(a))),
            Truth::UnitaryAffine(u) => Box::new(move |a| {
                let id = HermitianMatrix::identity(a.dim());
                Ok(u.act_on(&(&a.scale(2.0) + &id)))
            }),
        }
    }

    pub fn point_oracle(&self, tol: Tolerance) -> PointOracle {
        let u = self.operator().cloned().unwrap_or_else(|| SemilinearOperator::identity(1));
        Box::new(move |p| u.apply_point(p, &tol))
    }
}

fn fingerprint(a: &CMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    for z in a.iter() {
        // round so that an input and its recomputed copy agree
        ((z.re * 1e8).round() as i64).hash(&mut h);
        ((z.im * 1e8).round() as i64).hash(&mut h);
    }
    h.finish()
}

fn scrambler(n: usize, key: u64, tol: Tolerance) -> SemilinearOperator {
    SemilinearOperator::new(random_unitary_with(n, &mut rng_from_seed(key)), false, &tol).expect("unitary is invertible")
}

pub fn adversarial_matrix_oracle(class: ClassId, name: &str, n: usize, seed: u64, tol: Tolerance) -> MatrixOracle {
    let id = HermitianMatrix::identity(n);
    let ramp: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let fixed = HermitianMatrix::diag(&ramp);
    match (class, name) {
        (ClassId::OrderAuto, "order-reversing") => Box::new(|a| Ok(-a)),
        (ClassId::EffectOrtho, "order-reversing") => Box::new(move |a| Ok(&id - a)),
        (_, "square") => Box::new(|a| HermitianMatrix::from_matrix(a.mul_matrix(a))),
        (ClassId::ProjCommute, "constant") => {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            let p = HermitianMatrix::diag(&e);
            Box::new(move |_| Ok(p.clone()))
        }
        (_, "constant") => Box::new(move |_| Ok(fixed.clone())),
        (_, "scrambled") => Box::new(move |a| Ok(scrambler(a.dim(), seed ^ fingerprint(a.matrix()), tol).act_on(a))),
        (ClassId::ProjCommute, "noncommuting-swap") => {
            let p = symlab::projective::ProjectivePoint::basis(n, 0).projector();
            let mut q = CMatrix::zeros(n, n);
            for i in 0..2 {
                for j in 0..2 {
                    q[(i, j)] = symlab::matrixcore::re(0.5);
                }
            }
            let q = HermitianMatrix::from_matrix(q).expect("finite");
            Box::new(move |a| {
                Ok(if a.distance(&p) < 1e-9 {
                    q.clone()
                } else if a.distance(&q) < 1e-9 {
                    p.clone()
                } else {
                    a.clone()
                })
            })
        }
        (ClassId::ProjCommute, "halve") => Box::new(|a| Ok(a.scale(0.5))),
        (ClassId::ProjCommute, "zero") => Box::new(move |a| Ok(HermitianMatrix::zeros(a.dim()))),
        (ClassId::HermCommute, "nonscalar-shift") => Box::new(move |a| Ok(a + &fixed)),
        (ClassId::HermCommute, "mixed-unitary") => {
            let u1 = scrambler(n, seed, tol);
            let u2 = scrambler(n, seed.wrapping_add(1), tol);
            Box::new(move |a| {
                let distinct = symlab::matrixcore::eig_hermitian(a, &tol)?.cluster_values().len();
                Ok(if distinct <= 2 { u1.act_on(a) } else { u2.act_on(a) })
            })
        }
        (ClassId::HermCommute, "perturb") => {
            let x = random_hermitian_with(n, &mut rng_from_seed(seed));
            Box::new(move |a| {
                let ax = a.mul_matrix(&x);
                let sym = HermitianMatrix::from_matrix(&ax + ax.adjoint())?;
                Ok(a + &sym.scale(0.1))
            })
        }
        _ => Box::new(|a| Ok(a.clone())),
    }
}

pub fn adversarial_point_oracle(name: &str, n: usize, seed: u64, tol: Tolerance) -> PointOracle {
    match name {
        "constant" => Box::new(move |_| Ok(ProjectivePoint::basis(n, 0))),
        "scrambled" => Box::new(move |p| {
            let u = scrambler(n, seed ^ fingerprint(&p.projector().into_matrix()), tol);
            u.apply_point(p, &tol)
        }),
        // sends every ray to the nearest basis ray
        _ => Box::new(move |p| {
            let k = (0..n)
                .max_by(|&i, &j| p.vector()[i].norm().total_cmp(&p.vector()[j].norm()))
                .unwrap_or(0);
            Ok(ProjectivePoint::basis(n, k))
        }),
    }
}

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::commutant::{commutator_norm, commute};
use crate::effects::jordan_product;
use crate::error::{Error, Result};
use crate::matrixcore::random::{
    random_effect_with, random_hermitian_with, random_pd_with, random_projection_with,
    random_unit_vector, rng_from_seed, SeededRng,
};
use crate::matrixcore::{min_eigenvalue, sqrt_psd, HermitianMatrix, Tolerance};
use crate::orderrel::{is_adjacent, loewner_le};

/// A relation or operation a map is asked to preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contract {
    LoewnerOrderIff,
    AdjacencyIff,
    CommutativityIff,
    OrthogonalityIff,
    JordanProductMorphism,
    TripleProductMorphism,
    OrthocomplementCompatibility,
    TransitionProbabilityEqual,
}

impl Contract {
    pub const ALL: [Contract; 8] = [
        Contract::LoewnerOrderIff,
        Contract::AdjacencyIff,
        Contract::CommutativityIff,
        Contract::OrthogonalityIff,
        Contract::JordanProductMorphism,
        Contract::TripleProductMorphism,
        Contract::OrthocomplementCompatibility,
        Contract::TransitionProbabilityEqual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Contract::LoewnerOrderIff => "loewner_order_iff",
            Contract::AdjacencyIff => "adjacency_iff",
            Contract::CommutativityIff => "commutativity_iff",
            Contract::OrthogonalityIff => "orthogonality_iff",
            Contract::JordanProductMorphism => "jordan_product_morphism",
            Contract::TripleProductMorphism => "triple_product_morphism",
            Contract::OrthocomplementCompatibility => "orthocomplement_compatibility",
            Contract::TransitionProbabilityEqual => "transition_probability_equal",
        }
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Contract {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Contract::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::ContractUnknown(s.to_string()))
    }
}

/// The set pairs are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Hermitian,
    PositiveDefinite,
    Effects,
    Projections,
    RankOneProjections,
}

/// Draws pairs from a domain, mixing pairs that satisfy the contract's
/// relation with unrelated ones.
#[derive(Debug, Clone, Copy)]
pub struct PairSampler {
    pub domain: Domain,
    pub n: usize,
}

impl PairSampler {
    pub fn new(domain: Domain, n: usize) -> Self {
        PairSampler { domain, n }
    }

    /// Deterministic pairs checked before the random ones.
    pub fn canonical_pairs(&self) -> Vec<(HermitianMatrix, HermitianMatrix)> {
        let n = self.n;
        let zero = HermitianMatrix::zeros(n);
        let id = HermitianMatrix::identity(n);
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let p1 = HermitianMatrix::diag(&e1);
        match self.domain {
            Domain::Hermitian | Domain::Effects => vec![(zero, id.clone()), (p1.clone(), id), (p1.clone(), p1)],
            Domain::PositiveDefinite => vec![(id.clone(), id.scale(2.0))],
            Domain::Projections => vec![(p1.clone(), &id - &p1), (zero, id)],
            Domain::RankOneProjections => {
                if n < 2 {
                    return vec![];
                }
                let mut e2 = vec![0.0; n];
                e2[1] = 1.0;
                vec![(p1.clone(), HermitianMatrix::diag(&e2)), (p1.clone(), p1)]
            }
        }
    }

    fn single(&self, rng: &mut SeededRng) -> HermitianMatrix {
        let n = self.n;
        match self.domain {
            Domain::Hermitian => random_hermitian_with(n, rng),
            Domain::PositiveDefinite => random_pd_with(n, 0.2, 3.0, rng),
            Domain::Effects => random_effect_with(n, rng),
            Domain::Projections => {
                let r = rng.random_range(1..=n);
                random_projection_with(n, r, rng).expect("rank in range")
            }
            Domain::RankOneProjections => HermitianMatrix::outer(&random_unit_vector(n, rng)),
        }
    }

    /// A second element related to `a` in the sense of `contract`.
    fn related(&self, a: &HermitianMatrix, contract: Contract, rng: &mut SeededRng) -> HermitianMatrix {
        let n = self.n;
        let tol = Tolerance::default();
        match (contract, self.domain) {
            (Contract::LoewnerOrderIff, Domain::Effects) => {
                // a + (I - a)^{1/2} C (I - a)^{1/2} stays between a and I
                let gap = sqrt_psd(&(&HermitianMatrix::identity(n) - a), &tol).expect("effect");
                let c = random_effect_with(n, rng);
                a + &c.congruence(gap.matrix())
            }
            (Contract::LoewnerOrderIff, _) => a + &random_effect_with(n, rng),
            (Contract::AdjacencyIff, _) => {
                let y = random_unit_vector(n, rng);
                let t = rng.random_range(0.2..1.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let b = a + &HermitianMatrix::outer(&y).scale(t);
                if self.domain == Domain::Hermitian {
                    b
                } else {
                    a + &HermitianMatrix::outer(&y).scale(t.abs() * 0.1)
                }
            }
            (Contract::CommutativityIff, _) | (Contract::OrthogonalityIff, _) => {
                // same eigenbasis: a function of a, or a complementary piece for projections
                let sd = crate::matrixcore::eig_hermitian(a, &tol).expect("eig");
                match self.domain {
                    Domain::Projections | Domain::RankOneProjections => {
                        let k = sd.eigenvalues.iter().filter(|&&x| x < 0.5).count();
                        if k == 0 {
                            return HermitianMatrix::zeros(n);
                        }
                        let w = sd.eigenvectors.columns(0, k).into_owned();
                        let take = if self.domain == Domain::RankOneProjections { 1 } else { rng.random_range(1..=k) };
                        HermitianMatrix::projector_onto(&w.columns(0, take).into_owned())
                    }
                    _ => {
                        let vals: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
                        HermitianMatrix::from_eigen(&sd.eigenvectors, &vals)
                    }
                }
            }
            _ => self.single(rng),
        }
    }

    pub fn sample(&self, contract: Contract, rng: &mut SeededRng) -> (HermitianMatrix, HermitianMatrix) {
        let a = self.single(rng);
        match rng.random_range(0..3) {
            0 => {
                let b = self.related(&a, contract, rng);
                (a, b)
            }
            1 => {
                let b = self.related(&a, contract, rng);
                (b, a)
            }
            _ => {
                let b = self.single(rng);
                (a, b)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerance,
    /// Largest accepted quantitative residual.
    pub residual_tol: f64,
    pub parallel: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 1000,
            seed: 0,
            tol: Tolerance::default(),
            residual_tol: 1e-7,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub relation: String,
    pub expected: String,
    pub observed: String,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub contract: Contract,
    pub pass: bool,
    pub trials: usize,
    pub worst: f64,
    pub mean: f64,
    pub counterexample: Option<Counterexample>,
}

struct Outcome {
    residual: f64,
    mismatch: Option<(String, String)>,
}

fn boolean(expected: bool, observed: bool, residual: f64) -> Outcome {
    Outcome {
        residual,
        mismatch: (expected != observed).then(|| (expected.to_string(), observed.to_string())),
    }
}

fn evaluate<F>(oracle: &F, contract: Contract, a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<Outcome>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix>,
{
    let fa = oracle(a)?;
    let fb = oracle(b)?;
    let n = a.dim();
    Ok(match contract {
        Contract::LoewnerOrderIff => {
            let mut residual = 0.0_f64;
            let mut mismatch = None;
            for (x, y, fx, fy) in [(a, b, &fa, &fb), (b, a, &fb, &fa)] {
                let before = loewner_le(x, y, tol)?;
                let after = loewner_le(fx, fy, tol)?;
                if before {
                    residual = residual.max((-min_eigenvalue(&(fy - fx))).max(0.0));
                }
                if before != after && mismatch.is_none() {
                    mismatch = Some((format!("A <= B is {before}"), format!("phi(A) <= phi(B) is {after}")));
                }
            }
            Outcome { residual, mismatch }
        }
        Contract::AdjacencyIff => boolean(is_adjacent(a, b, tol)?, is_adjacent(&fa, &fb, tol)?, 0.0),
        Contract::CommutativityIff => {
            let before = commute(a, b, tol)?;
            let after = commute(&fa, &fb, tol)?;
            let residual = if before { commutator_norm(&fa, &fb)? } else { 0.0 };
            boolean(before, after, residual)
        }
        Contract::OrthogonalityIff => {
            let prod = |x: &HermitianMatrix, y: &HermitianMatrix| crate::matrixcore::operator_norm(&x.mul_matrix(y));
            let before = prod(a, b) <= tol.effective(1.0);
            let after = prod(&fa, &fb) <= tol.effective(1.0) * 10.0;
            let residual = if before { prod(&fa, &fb) } else { 0.0 };
            boolean(before, after, residual)
        }
        Contract::JordanProductMorphism => {
            let lhs = oracle(&jordan_product(a, b)?)?;
            let rhs = jordan_product(&fa, &fb)?;
            Outcome {
                residual: lhs.distance(&rhs),
                mismatch: None,
            }
        }
        Contract::TripleProductMorphism => {
            let lhs = oracle(&b.congruence(a.matrix()))?;
            let rhs = fb.congruence(fa.matrix());
            Outcome {
                residual: lhs.distance(&rhs),
                mismatch: None,
            }
        }
        Contract::OrthocomplementCompatibility => {
            let id = HermitianMatrix::identity(n);
            let lhs = oracle(&(&id - a))?;
            Outcome {
                residual: lhs.distance(&(&id - &fa)),
                mismatch: None,
            }
        }
        Contract::TransitionProbabilityEqual => {
            let tr = |x: &HermitianMatrix, y: &HermitianMatrix| x.mul_matrix(y).trace().re;
            Outcome {
                residual: (tr(a, b) - tr(&fa, &fb)).abs(),
                mismatch: None,
            }
        }
    })
}

/// Checks that `oracle` preserves `contract` on canonical pairs followed by
/// `trials` random pairs; trial `i` draws from the seed `seed + i`.
pub fn verify_symmetry<F>(oracle: F, contract: Contract, sampler: &PairSampler, cfg: &VerifyConfig) -> Result<VerifyReport>
where
    F: Fn(&HermitianMatrix) -> Result<HermitianMatrix> + Sync,
{
    cfg.tol.check_dim(sampler.n)?;
    let canon = sampler.canonical_pairs();
    let pair = |i: usize| -> (HermitianMatrix, HermitianMatrix) {
        if i < canon.len() {
            canon[i].clone()
        } else {
            let mut rng = rng_from_seed(cfg.seed.wrapping_add((i - canon.len()) as u64));
            sampler.sample(contract, &mut rng)
        }
    };
    let total = canon.len() + cfg.trials;
    let run = |i: usize| -> Result<(HermitianMatrix, HermitianMatrix, Outcome)> {
        let (a, b) = pair(i);
        let o = evaluate(&oracle, contract, &a, &b, &cfg.tol)?;
        Ok((a, b, o))
    };
    let results: Vec<_> = if cfg.parallel {
        (0..total).into_par_iter().map(run).collect::<Result<_>>()?
    } else {
        (0..total).map(run).collect::<Result<_>>()?
    };

    let mut worst = 0.0_f64;
    let mut sum = 0.0;
    let mut counterexample = None;
    for (a, b, o) in results {
        worst = worst.max(o.residual);
        sum += o.residual;
        if counterexample.is_none() && (o.mismatch.is_some() || o.residual > cfg.residual_tol) {
            let (expected, observed) = o
                .mismatch
                .unwrap_or_else(|| (format!("residual <= {:e}", cfg.residual_tol), format!("{:e}", o.residual)));
            counterexample = Some(Counterexample {
                a,
                b,
                relation: contract.name().to_string(),
                expected,
                observed,
                residual: o.residual,
            });
        }
    }
    Ok(VerifyReport {
        contract,
        pass: counterexample.is_none(),
        trials: total,
        worst,
        mean: if total > 0 { sum / total as f64 } else { 0.0 },
        counterexample,
    })
}

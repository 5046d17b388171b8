//! Seeded invariant suites, one per theorem identifier, shared by the
//! command-line front end.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::commutant::{adversarial_partner, bicommutant_rank_one_test, second_commutant_projections};
use crate::effects::{coexistent, geometric_mean, witness_defect, CoexistenceConfig, Effect, Verdict};
use crate::error::{Error, Result};
use crate::matrixcore::random::{
    random_density_with, random_effect_in, random_effect_with, random_hermitian_with,
    random_invertible_with, random_pd_with, random_projection_with, random_unit_vector,
    random_unitary_with, rng_from_seed, SeededRng,
};
use crate::matrixcore::{HermitianMatrix, Tolerance};
use crate::orderrel::{comparable, dagger_check, is_adjacent, loewner_le};
use crate::projective::{
    frame_sample_from_density, gleason_fit, optimal_wigner_reconstruct, semilinear_reconstruct,
    ProbeConfig, ProjectivePoint, Projection, SemilinearOperator,
};
use crate::reconstruct::{
    effect_ortho_order_reconstruct, hermitian_commutativity_reconstruct, isotropic_hyperplane,
    CommutativityConfig,
};
use crate::symmetry::{
    molnar_tau, molnar_tau_by_composition, verify_symmetry, Contract, Domain, PairSampler,
    SymmetryDescriptor, VerifyConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteId {
    Dagger,
    Hyperplane,
    MeanSymmetry,
    MolnarOrder,
    Uhlhorn,
    Ludwig,
    Bicommutant,
    Gleason,
    Commutativity,
    Coexistence,
}

impl SuiteId {
    pub const ALL: [SuiteId; 10] = [
        SuiteId::Dagger,
        SuiteId::Hyperplane,
        SuiteId::MeanSymmetry,
        SuiteId::MolnarOrder,
        SuiteId::Uhlhorn,
        SuiteId::Ludwig,
        SuiteId::Bicommutant,
        SuiteId::Gleason,
        SuiteId::Commutativity,
        SuiteId::Coexistence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Dagger => "T2.2-dagger",
            SuiteId::Hyperplane => "T2.3-hyperplane",
            SuiteId::MeanSymmetry => "MEAN-sym",
            SuiteId::MolnarOrder => "VAU-order",
            SuiteId::Uhlhorn => "T3.1-uhlhorn",
            SuiteId::Ludwig => "T3.2-ludwig",
            SuiteId::Bicommutant => "T3.3-bicommutant",
            SuiteId::Gleason => "T4.1-gleason",
            SuiteId::Commutativity => "T4.2-commutativity",
            SuiteId::Coexistence => "COEX-oracle",
        }
    }

    pub fn min_dim(self) -> usize {
        match self {
            SuiteId::Uhlhorn | SuiteId::Bicommutant | SuiteId::Gleason | SuiteId::Commutativity => 3,
            _ => 2,
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            SuiteId::Dagger | SuiteId::Hyperplane => 1000,
            SuiteId::MeanSymmetry | SuiteId::MolnarOrder | SuiteId::Coexistence => 500,
            SuiteId::Bicommutant => 200,
            SuiteId::Gleason => 200,
            SuiteId::Uhlhorn | SuiteId::Ludwig | SuiteId::Commutativity => 50,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::ContractUnknown(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteVerdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Detail {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

#[derive(Debug, Clone)]
pub struct SuiteCounterexample {
    /// Relation name understood by the `check` command where one applies.
    pub relation: String,
    pub expected: String,
    pub observed: String,
    pub matrices: Vec<(String, HermitianMatrix)>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub verdict: SuiteVerdict,
    pub trials: usize,
    pub worst: f64,
    pub mean: f64,
    pub counterexample: Option<SuiteCounterexample>,
    pub details: Vec<(String, Detail)>,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

struct Acc {
    suite: SuiteId,
    trials: usize,
    worst: f64,
    sum: f64,
    count: usize,
    bound: f64,
    counterexample: Option<SuiteCounterexample>,
    details: Vec<(String, Detail)>,
}

impl Acc {
    fn new(suite: SuiteId, bound: f64) -> Self {
        Acc {
            suite,
            trials: 0,
            worst: 0.0,
            sum: 0.0,
            count: 0,
            bound,
            counterexample: None,
            details: Vec::new(),
        }
    }

    fn residual(&mut self, r: f64) {
        self.worst = self.worst.max(r);
        self.sum += r;
        self.count += 1;
    }

    fn fail(&mut self, relation: &str, expected: impl fmt::Display, observed: impl fmt::Display, matrices: Vec<(&str, HermitianMatrix)>) {
        if self.counterexample.is_none() {
            self.counterexample = Some(SuiteCounterexample {
                relation: relation.to_string(),
                expected: expected.to_string(),
                observed: observed.to_string(),
                matrices: matrices.into_iter().map(|(k, m)| (k.to_string(), m)).collect(),
            });
        }
    }

    fn detail(&mut self, key: &str, value: Detail) {
        self.details.push((key.to_string(), value));
    }

    fn finish(self) -> SuiteReport {
        let verdict = if self.counterexample.is_some() || self.worst > self.bound {
            SuiteVerdict::Fail
        } else {
            SuiteVerdict::Pass
        };
        SuiteReport {
            suite: self.suite,
            verdict,
            trials: self.trials,
            worst: self.worst,
            mean: if self.count > 0 { self.sum / self.count as f64 } else { 0.0 },
            counterexample: self.counterexample,
            details: self.details,
        }
    }
}

/// Pairs for the adjacency suites: adjacent, comparable of higher rank,
/// incomparable, and unrelated, in rotation.
pub fn adjacency_pair(n: usize, kind: usize, rng: &mut SeededRng) -> (HermitianMatrix, HermitianMatrix) {
    let a = random_hermitian_with(n, rng);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let delta = match kind % 4 {
        0 => HermitianMatrix::outer(&random_unit_vector(n, rng)).scale(sign * rng.random_range(0.1..2.0)),
        1 => {
            let k = rng.random_range(2..=n);
            let w = random_unitary_with(n, rng);
            let vals: Vec<f64> = (0..n).map(|i| if i < k { rng.random_range(0.1..2.0) } else { 0.0 }).collect();
            HermitianMatrix::from_eigen(&w, &vals).scale(sign)
        }
        2 => {
            let w = random_unitary_with(n, rng);
            let vals: Vec<f64> = (0..n)
                .map(|i| match i {
                    0 => rng.random_range(0.1..2.0),
                    1 => -rng.random_range(0.1..2.0),
                    _ => rng.random_range(-2.0..2.0),
                })
                .collect();
            HermitianMatrix::from_eigen(&w, &vals)
        }
        _ => random_hermitian_with(n, rng),
    };
    let b = &a + &delta;
    (a, b)
}

fn dagger_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Dagger, 0.0);
    let tol = &cfg.tol;
    let mut witnesses = 0;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let (a, b) = adjacency_pair(cfg.dim, i, &mut rng);
        acc.trials += 1;
        let adj = is_adjacent(&a, &b, tol)?;
        let v = dagger_check(&a, &b, tol)?;
        if adj != v.satisfies_dagger() {
            acc.fail("adjacent", adj, v.satisfies_dagger(), vec![("A", a.clone()), ("B", b.clone())]);
        }
        if let Some((c, d)) = &v.witness {
            witnesses += 1;
            let (lo, hi) = if loewner_le(&a, &b, tol)? { (&a, &b) } else { (&b, &a) };
            let between = loewner_le(lo, c, tol)? && loewner_le(c, hi, tol)? && loewner_le(lo, d, tol)? && loewner_le(d, hi, tol)?;
            if !between || comparable(c, d, tol)? {
                acc.fail("le", "witness between inputs and incomparable", "witness check failed", vec![("A", a.clone()), ("B", b.clone()), ("C", c.clone()), ("D", d.clone())]);
            }
        }
    }
    acc.detail("witnesses", Detail::Int(witnesses));
    Ok(acc.finish())
}

fn hyperplane_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Hyperplane, 1e-8);
    let tol = &cfg.tol;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let (a, b) = adjacency_pair(cfg.dim, i, &mut rng);
        acc.trials += 1;
        let d = &a - &b;
        let adj = is_adjacent(&a, &b, tol)?;
        match isotropic_hyperplane(&d, tol) {
            Some(y) => {
                if !adj {
                    acc.fail("adjacent", false, true, vec![("A", a.clone()), ("B", b.clone())]);
                }
                // x orthogonal to y lies in the zero set of x -> x* D x
                let mut x = random_unit_vector(cfg.dim, &mut rng);
                x -= y.vector() * y.vector().dotc(&x);
                acc.residual(d.quadratic_form(&x).abs() / d.spectral_norm().max(1.0));
            }
            None => {
                if adj {
                    acc.fail("adjacent", true, false, vec![("A", a.clone()), ("B", b.clone())]);
                }
            }
        }
    }
    Ok(acc.finish())
}

fn mean_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::MeanSymmetry, 1e-7);
    let tol = &cfg.tol;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let a = random_pd_with(cfg.dim, 0.1, 3.0, &mut rng);
        let b = random_pd_with(cfg.dim, 0.1, 3.0, &mut rng);
        let t = random_invertible_with(cfg.dim, &mut rng);
        acc.trials += 1;
        let ab = geometric_mean(&a, &b, tol)?;
        let ba = geometric_mean(&b, &a, tol)?;
        let scale = ab.spectral_norm().max(1.0);
        let sym = ab.distance(&ba) / scale;
        let lhs = ab.congruence(&t);
        let rhs = geometric_mean(&a.congruence(&t), &b.congruence(&t), tol)?;
        let eq = lhs.distance(&rhs) / lhs.spectral_norm().max(1.0);
        acc.residual(sym.max(eq));
        if sym.max(eq) > acc.bound {
            acc.fail("geometric_mean", "symmetric and congruence equivariant", format!("residual {:e}", sym.max(eq)), vec![("A", a), ("B", b)]);
        }
    }
    Ok(acc.finish())
}

/// Invertible effect with spectrum in `[0.1, 1]`.
pub fn molnar_parameter(n: usize, rng: &mut SeededRng) -> HermitianMatrix {
    random_effect_in(n, 0.1, 1.0, rng)
}

fn molnar_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::MolnarOrder, 1e-7);
    let tol = cfg.tol;
    let n = cfg.dim;
    let mut rng = rng_from_seed(cfg.seed);
    let t = molnar_parameter(n, &mut rng);
    let te = Effect::new(t.clone(), &tol)?;
    let phi = SymmetryDescriptor::Molnar { t: t.clone() };
    let rep = verify_symmetry(
        |a: &HermitianMatrix| phi.apply(a, &tol),
        Contract::LoewnerOrderIff,
        &PairSampler::new(Domain::Effects, n),
        &VerifyConfig { trials: cfg.trials, seed: cfg.seed, tol, residual_tol: 1e-7, parallel: true },
    )?;
    acc.trials = rep.trials;
    acc.residual(rep.worst);
    if let Some(ce) = rep.counterexample {
        let (fa, fb) = (phi.apply(&ce.a, &tol)?, phi.apply(&ce.b, &tol)?);
        acc.fail("le", ce.expected, ce.observed, vec![("A", ce.a), ("B", ce.b), ("phi(A)", fa), ("phi(B)", fb)]);
    }
    let zero = phi.apply(&HermitianMatrix::zeros(n), &tol)?.spectral_norm();
    let one = phi.apply(&HermitianMatrix::identity(n), &tol)?.distance(&HermitianMatrix::identity(n));
    acc.detail("phi(0)_defect", Detail::Float(zero));
    acc.detail("phi(I)_defect", Detail::Float(one));
    if zero.max(one) > 1e-9 {
        acc.fail("vau", "phi(0) = 0 and phi(I) = I", format!("defect {:e}", zero.max(one)), vec![("T", t.clone())]);
    }
    let mut chain = 0.0_f64;
    for i in 0..cfg.trials.min(100) {
        let mut r = rng_from_seed(cfg.seed.wrapping_add(1_000_000 + i as u64));
        let a = Effect::new(random_effect_with(n, &mut r), &tol)?;
        let closed = molnar_tau(&te, &a, &tol)?;
        let composed = molnar_tau_by_composition(&te, &a, &tol)?;
        chain = chain.max(closed.matrix().distance(&composed));
    }
    acc.detail("tau_chain_residual", Detail::Float(chain));
    acc.residual(chain);
    Ok(acc.finish())
}

fn hidden_unitary(n: usize, conj: bool, rng: &mut SeededRng, tol: &Tolerance) -> Result<SemilinearOperator> {
    SemilinearOperator::new(random_unitary_with(n, rng), conj, tol)
}

fn uhlhorn_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Uhlhorn, 1e-6);
    let n = cfg.dim;
    let tol = cfg.tol;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let conj = i % 2 == 1;
        let u0 = hidden_unitary(n, conj, &mut rng, &tol)?;
        let mut oracle = |p: &ProjectivePoint| u0.apply_point(p, &tol);
        let pc = ProbeConfig { tol, seed: cfg.seed.wrapping_add(i as u64), ..Default::default() };
        acc.trials += 1;
        match semilinear_reconstruct(&mut oracle, n, &pc) {
            Ok(fit) => {
                let gap = n as f64 - fit.operator.gauge_overlap(&u0);
                acc.residual(gap.max(0.0));
                if fit.operator.conjugates() != conj || gap > 1e-6 {
                    acc.fail("wigner", format!("overlap {n}, conjugates {conj}"), format!("gap {gap:e}, conjugates {}", fit.operator.conjugates()), vec![]);
                }
            }
            Err(e) => acc.fail("wigner", "reconstruction", e, vec![]),
        }
    }
    Ok(acc.finish())
}

fn ludwig_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Ludwig, 1e-6);
    let n = cfg.dim;
    let tol = cfg.tol;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let conj = i % 2 == 1;
        let u0 = hidden_unitary(n, conj, &mut rng, &tol)?;
        let truth = SymmetryDescriptor::UnitarySimilarity(u0.clone());
        let mut oracle = |a: &HermitianMatrix| truth.apply(a, &tol);
        let pc = ProbeConfig { tol, seed: cfg.seed.wrapping_add(i as u64), ..Default::default() };
        acc.trials += 1;
        match effect_ortho_order_reconstruct(&mut oracle, n, &pc) {
            Ok(r) => {
                acc.residual(r.residual);
                if let SymmetryDescriptor::UnitarySimilarity(u) = &r.descriptor {
                    let gap = n as f64 - u.gauge_overlap(&u0);
                    if u.conjugates() != conj || gap > 1e-6 {
                        acc.fail("effect-ortho", "hidden unitary recovered", format!("gap {gap:e}"), vec![]);
                    }
                }
            }
            Err(e) => acc.fail("effect-ortho", "reconstruction", e, vec![]),
        }
    }
    let mut flip = |a: &HermitianMatrix| Ok(&HermitianMatrix::identity(n) - a);
    let rejected = matches!(
        effect_ortho_order_reconstruct(&mut flip, n, &ProbeConfig { tol, seed: cfg.seed, ..Default::default() }),
        Err(Error::OracleNotInClass { .. })
    );
    acc.detail("order_reversal_rejected", Detail::Bool(rejected));
    if !rejected {
        acc.fail("effect-ortho", "A -> I - A rejected", "accepted", vec![]);
    }
    Ok(acc.finish())
}

/// `diag(...)` of a diagonal matrix, `spec(...)` otherwise.
fn diag_text(m: &HermitianMatrix) -> String {
    let (label, vals) = if m.is_diagonal(1e-12) { ("diag", m.diagonal()) } else { ("spec", m.eigenvalues()) };
    let parts: Vec<String> = vals.iter().map(|x| format!("{}", (x * 1e6).round() / 1e6)).collect();
    format!("{label}({})", parts.join(","))
}

fn bicommutant_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Bicommutant, 0.0);
    let n = cfg.dim;
    let tol = &cfg.tol;
    let mut rng = rng_from_seed(cfg.seed);
    let p1 = Projection::new(random_projection_with(n, 1, &mut rng)?, tol)?;
    let size1 = second_commutant_projections(&p1, &adversarial_partner(&p1, tol)?, tol)?.len();
    acc.detail("rank_one_cardinality", Detail::Int(size1 as i64));
    if size1 != 8 {
        acc.fail("bicommutant", 8, size1, vec![("P", p1.matrix().clone())]);
    }
    if n >= 4 {
        let mut d = vec![0.0; n];
        d[0] = 1.0;
        d[1] = 1.0;
        let p = Projection::new(HermitianMatrix::diag(&d), tol)?;
        let q = adversarial_partner(&p, tol)?;
        let elements = second_commutant_projections(&p, &q, tol)?;
        let size = elements.len();
        acc.detail("middle_rank_cardinality", Detail::Int(size as i64));
        acc.detail("middle_rank_witness_P", Detail::Text(diag_text(p.matrix())));
        acc.detail("middle_rank_witness_Q", Detail::Text(diag_text(q.matrix())));
        let listed: Vec<String> = elements.iter().map(diag_text).collect();
        acc.detail("middle_rank_elements", Detail::Text(listed.join("; ")));
        if size != 16 {
            acc.fail("bicommutant", 16, size, vec![("P", p.matrix().clone()), ("Q", q.matrix().clone())]);
        }
    }
    let mut errors = 0;
    for r in 1..n {
        for i in 0..cfg.trials {
            let mut rr = rng_from_seed(cfg.seed.wrapping_add((r * 100_000 + i) as u64));
            let p = Projection::new(random_projection_with(n, r, &mut rr)?, tol)?;
            acc.trials += 1;
            let claimed = bicommutant_rank_one_test(&p, 4, cfg.seed.wrapping_add(i as u64), tol)?;
            let truth = r == 1 || r == n - 1;
            if claimed != truth {
                errors += 1;
                acc.fail("bicommutant", truth, claimed, vec![("P", p.matrix().clone())]);
            }
        }
    }
    acc.detail("classification_errors", Detail::Int(errors));
    Ok(acc.finish())
}

fn gleason_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Gleason, 1e-8);
    let n = cfg.dim;
    let tol = cfg.tol;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let d0 = random_density_with(n, &mut rng);
        acc.trials += 1;
        let d = gleason_fit(&frame_sample_from_density(&d0), n, &tol)?;
        let err = (d.matrix() - d0.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        acc.residual(err);
        if err > 1e-8 {
            acc.fail("gleason", "fit recovers the density", format!("max entry error {err:e}"), vec![("D", d0)]);
        }
    }
    let mut min_trace = f64::INFINITY;
    for i in 0..cfg.trials.min(10) {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(500_000 + i as u64));
        let u0 = hidden_unitary(n, i % 2 == 1, &mut rng, &tol)?;
        let mut oracle = |p: &ProjectivePoint| u0.apply_point(p, &tol);
        let pc = ProbeConfig { tol, seed: cfg.seed.wrapping_add(i as u64), ..Default::default() };
        match optimal_wigner_reconstruct(&mut oracle, n, &pc) {
            Ok(fit) => {
                min_trace = min_trace.min(fit.min_gleason_trace);
                if fit.min_gleason_trace < 1.0 - 1e-8 || n as f64 - fit.fit.operator.gauge_overlap(&u0) > 1e-6 {
                    acc.fail("optimal-wigner", "tr(E_Q Q) = 1 and U recovered", fit.min_gleason_trace, vec![]);
                }
            }
            Err(e) => acc.fail("optimal-wigner", "reconstruction", e, vec![]),
        }
    }
    acc.detail("min_gleason_trace", Detail::Float(min_trace));
    Ok(acc.finish())
}

fn commutativity_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Commutativity, 1e-6);
    let n = cfg.dim;
    let tol = cfg.tol;
    let mut tables = 0;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        let conj = i % 2 == 1;
        let u0 = hidden_unitary(n, conj, &mut rng, &tol)?;
        let id = HermitianMatrix::identity(n);
        let mut oracle = |a: &HermitianMatrix| Ok(u0.act_on(&(&a.scale(2.0) + &id)));
        let mut cc = CommutativityConfig::with_seed(cfg.seed.wrapping_add(i as u64));
        cc.probe.tol = tol;
        acc.trials += 1;
        match hermitian_commutativity_reconstruct(&mut oracle, n, &cc) {
            Ok((r, ts)) => {
                acc.residual(r.residual);
                for t in &ts {
                    tables += 1;
                    let dev = t.table.max_deviation(|x| 2.0 * x + 1.0);
                    if dev > 1e-6 {
                        acc.fail("herm-commute", "f(x) = 2x + 1", format!("table deviation {dev:e}"), vec![("A", t.probe.clone())]);
                    }
                }
            }
            Err(e) => acc.fail("herm-commute", "reconstruction", e, vec![]),
        }
    }
    acc.detail("tables_checked", Detail::Int(tables));
    Ok(acc.finish())
}

fn coexistence_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut acc = Acc::new(SuiteId::Coexistence, 1e-8);
    let n = cfg.dim;
    let tol = cfg.tol;
    let cc = CoexistenceConfig { tol, ..Default::default() };
    let mut unknown = 0;
    for i in 0..cfg.trials {
        let mut rng = rng_from_seed(cfg.seed.wrapping_add(i as u64));
        acc.trials += 1;
        // commuting pair, expect a witness
        let w = random_unitary_with(n, &mut rng);
        let da: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let db: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let a = Effect::new(HermitianMatrix::from_eigen(&w, &da), &tol)?;
        let b = Effect::new(HermitianMatrix::from_eigen(&w, &db), &tol)?;
        let d = coexistent(&a, &b, &cc)?;
        match (&d.verdict, &d.witness) {
            (Verdict::Yes, Some(wit)) => acc.residual(witness_defect(&a, &b, wit)),
            _ => acc.fail("coexistent", "Yes", format!("{:?}", d.verdict), vec![("A", a.matrix().clone()), ("B", b.matrix().clone())]),
        }
        // noncommuting projections, expect No
        let p = random_projection_with(n, rng.random_range(1..n), &mut rng)?;
        let q = random_projection_with(n, rng.random_range(1..n), &mut rng)?;
        let (pe, qe) = (Effect::new(p.clone(), &tol)?, Effect::new(q.clone(), &tol)?);
        if !crate::commutant::commute(&p, &q, &tol)? {
            let d = coexistent(&pe, &qe, &cc)?;
            if d.verdict != Verdict::No {
                acc.fail("coexistent", "No", format!("{:?}", d.verdict), vec![("A", p), ("B", q)]);
            }
        }
        // scalar against anything
        let s = rng.random_range(0.0..1.0);
        let any = Effect::new(random_effect_with(n, &mut rng), &tol)?;
        let d = coexistent(&Effect::scalar(n, s, &tol)?, &any, &cc)?;
        match (&d.verdict, &d.witness) {
            (Verdict::Yes, Some(wit)) => acc.residual(wit.g.matrix().distance(&any.matrix().scale(s))),
            _ => acc.fail("coexistent", "Yes", format!("{:?}", d.verdict), vec![("B", any.matrix().clone())]),
        }
        // unrelated pair: any decisive verdict must be certified
        let x = Effect::new(random_effect_with(n, &mut rng), &tol)?;
        let y = Effect::new(random_effect_with(n, &mut rng), &tol)?;
        let d = coexistent(&x, &y, &cc)?;
        match d.verdict {
            Verdict::Unknown => unknown += 1,
            Verdict::Yes => acc.residual(witness_defect(&x, &y, d.witness.as_ref().expect("witness"))),
            Verdict::No => {}
        }
    }
    let rate = unknown as f64 / cfg.trials.max(1) as f64;
    acc.detail("unknown_rate", Detail::Float(rate));
    if rate >= 0.2 {
        acc.fail("coexistent", "unknown rate below 0.2", rate, vec![]);
    }
    Ok(acc.finish())
}

/// Runs one suite. Dimensions below the suite's minimum are rejected.
pub fn run_suite(id: SuiteId, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.tol.check_dim(cfg.dim)?;
    if cfg.dim < id.min_dim() {
        return Err(Error::DimensionTooSmall { n: cfg.dim, min: id.min_dim() });
    }
    match id {
        SuiteId::Dagger => dagger_suite(cfg),
        SuiteId::Hyperplane => hyperplane_suite(cfg),
        SuiteId::MeanSymmetry => mean_suite(cfg),
        SuiteId::MolnarOrder => molnar_suite(cfg),
        SuiteId::Uhlhorn => uhlhorn_suite(cfg),
        SuiteId::Ludwig => ludwig_suite(cfg),
        SuiteId::Bicommutant => bicommutant_suite(cfg),
        SuiteId::Gleason => gleason_suite(cfg),
        SuiteId::Commutativity => commutativity_suite(cfg),
        SuiteId::Coexistence => coexistence_suite(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip() {
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        }
        assert!("T9.9".parse::<SuiteId>().is_err());
    }

    #[test]
    fn every_suite_passes_small() {
        for id in SuiteId::ALL {
            let cfg = SuiteConfig { dim: id.min_dim().max(3), trials: 6, seed: 1, tol: Tolerance::default() };
            let r = run_suite(id, &cfg).unwrap();
            assert_eq!(r.verdict, SuiteVerdict::Pass, "{id}: {r:?}");
        }
    }

    #[test]
    fn dimension_minimum_enforced() {
        let cfg = SuiteConfig { dim: 2, trials: 1, seed: 0, tol: Tolerance::default() };
        assert!(matches!(run_suite(SuiteId::Bicommutant, &cfg), Err(Error::DimensionTooSmall { .. })));
    }
}

//! Coexistence as feasibility of `0 <= G`, `G <= A`, `G <= B`, `G >= A + B - I`.

use super::Effect;
use crate::commutant::commute;
use crate::error::Result;
use crate::matrixcore::{
    apply_to_decomposition, eig_hermitian, min_eigenvalue, rank_tol, HermitianMatrix, Tolerance,
};
use crate::projective::is_projection;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Which decision procedure produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Scalar,
    ProjectionPair,
    Commuting,
    RankOne,
    Dykstra,
    DualCertificate,
}

/// `A = E + G`, `B = F + G` with `E + F + G <= I`.
#[derive(Debug, Clone)]
pub struct CoexistenceWitness {
    pub e: Effect,
    pub f: Effect,
    pub g: Effect,
}

#[derive(Debug, Clone)]
pub struct CoexistenceDecision {
    pub verdict: Verdict,
    pub witness: Option<CoexistenceWitness>,
    pub iterations: usize,
    pub residual: f64,
    pub route: Route,
    pub reason: String,
}

#[derive(Debug, Clone, Copy)]
pub struct CoexistenceConfig {
    pub tol: Tolerance,
    pub max_iterations: usize,
}

impl Default for CoexistenceConfig {
    fn default() -> Self {
        CoexistenceConfig {
            tol: Tolerance::default(),
            max_iterations: 10_000,
        }
    }
}

/// Largest violation of the witness conditions.
pub fn witness_defect(a: &Effect, b: &Effect, w: &CoexistenceWitness) -> f64 {
    let (e, f, g) = (w.e.matrix(), w.f.matrix(), w.g.matrix());
    let n = a.dim();
    let sum_a = (e + g).distance(a.matrix());
    let sum_b = (f + g).distance(b.matrix());
    let total = &(e + f) + g;
    let top = -min_eigenvalue(&(&HermitianMatrix::identity(n) - &total));
    [sum_a, sum_b, -min_eigenvalue(e), -min_eigenvalue(f), -min_eigenvalue(g), top]
        .into_iter()
        .fold(0.0, f64::max)
}

fn psd_part(x: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let sd = eig_hermitian(x, tol)?;
    apply_to_decomposition(&sd, |v| Some(v.max(0.0)))
}

fn neg_violation(x: &HermitianMatrix) -> f64 {
    (-min_eigenvalue(x)).max(0.0)
}

struct Problem<'a> {
    a: &'a Effect,
    b: &'a Effect,
    tol: Tolerance,
    n: usize,
}

impl Problem<'_> {
    fn lower(&self) -> HermitianMatrix {
        &(self.a.matrix() + self.b.matrix()) - &HermitianMatrix::identity(self.n)
    }

    /// Witness from `G`, accepted when its defect is within `10 * tol`.
    fn witness_from(&self, g: &HermitianMatrix) -> Option<(CoexistenceWitness, f64)> {
        let t = &self.tol;
        let w = CoexistenceWitness {
            e: Effect::new(self.a.matrix() - g, t).ok()?,
            f: Effect::new(self.b.matrix() - g, t).ok()?,
            g: Effect::new(g.clone(), t).ok()?,
        };
        let d = witness_defect(self.a, self.b, &w);
        (d <= 10.0 * t.effective(1.0)).then_some((w, d))
    }

    fn decided(
        &self,
        verdict: Verdict,
        witness: Option<(CoexistenceWitness, f64)>,
        route: Route,
        iterations: usize,
        reason: impl Into<String>,
    ) -> CoexistenceDecision {
        let (witness, residual) = match witness {
            Some((w, d)) => (Some(w), d),
            None => (None, 0.0),
        };
        CoexistenceDecision {
            verdict,
            witness,
            iterations,
            residual,
            route,
            reason: reason.into(),
        }
    }

    fn scalar_route(&self) -> Option<CoexistenceDecision> {
        for (x, y) in [(self.a, self.b), (self.b, self.a)] {
            if super::is_scalar(x.matrix(), &self.tol) {
                let t = x.matrix().trace() / self.n as f64;
                let g = y.matrix().scale(t);
                if let Some(w) = self.witness_from(&g) {
                    return Some(self.decided(Verdict::Yes, Some(w), Route::Scalar, 0, "scalar argument, G = tB"));
                }
            }
        }
        None
    }

    fn projection_route(&self) -> Result<Option<CoexistenceDecision>> {
        let (p, q) = (self.a.matrix(), self.b.matrix());
        if !(is_projection(p, &self.tol) && is_projection(q, &self.tol)) {
            return Ok(None);
        }
        if commute(p, q, &self.tol)? {
            let g = HermitianMatrix::hermitize(p.mul_matrix(q));
            if let Some(w) = self.witness_from(&g) {
                return Ok(Some(self.decided(Verdict::Yes, Some(w), Route::ProjectionPair, 0, "commuting projections, G = PQ")));
            }
            return Ok(None);
        }
        Ok(Some(self.decided(
            Verdict::No,
            None,
            Route::ProjectionPair,
            0,
            "projections coexist only if they commute",
        )))
    }

    fn commuting_route(&self) -> Result<Option<CoexistenceDecision>> {
        let (a, b) = (self.a.matrix(), self.b.matrix());
        if !commute(a, b, &self.tol)? {
            return Ok(None);
        }
        if (a + b).distance(&HermitianMatrix::identity(self.n)) <= self.tol.effective(1.0) {
            let w = self.witness_from(&HermitianMatrix::zeros(self.n));
            return Ok(w.map(|w| self.decided(Verdict::Yes, Some(w), Route::Commuting, 0, "B = I - A, G = 0")));
        }
        // a generic combination separates the joint eigenspaces
        let mix = a + &b.scale(0.618_033_988_749_894_8);
        let v = eig_hermitian(&mix, &self.tol)?.eigenvectors;
        let mins: Vec<f64> = (0..self.n)
            .map(|i| {
                let x = v.column(i).into_owned();
                a.quadratic_form(&x).min(b.quadratic_form(&x))
            })
            .collect();
        let g = HermitianMatrix::from_eigen(&v, &mins);
        Ok(self
            .witness_from(&g)
            .map(|w| self.decided(Verdict::Yes, Some(w), Route::Commuting, 0, "joint eigenbasis, G = min(A, B)")))
    }

    /// Exact test when one of `A`, `I - A`, `B`, `I - B` has rank one.
    fn rank_one_route(&self) -> Result<Option<CoexistenceDecision>> {
        let t = &self.tol;
        let candidates = [
            (self.a.clone(), self.b, false),
            (self.a.orthocomplement(), self.b, true),
            (self.b.clone(), self.a, false),
            (self.b.orthocomplement(), self.a, true),
        ];
        for (x, y, complemented) in candidates {
            if rank_tol(x.matrix(), t) != 1 {
                continue;
            }
            let sd = eig_hermitian(x.matrix(), t)?;
            let s = sd.max();
            let v = sd.eigenvector(self.n - 1);
            let m1 = max_multiple_below(y.matrix(), &v, t)?;
            let m2 = max_multiple_below(y.orthocomplement().matrix(), &v, t)?;
            let lo = (s - m2).max(0.0);
            let hi = s.min(m1);
            if lo <= hi {
                let g_small = HermitianMatrix::outer(&v).scale(0.5 * (lo + hi));
                let g = if complemented {
                    y.matrix() - &g_small
                } else {
                    g_small
                };
                if let Some(w) = self.witness_from(&g) {
                    return Ok(Some(self.decided(Verdict::Yes, Some(w), Route::RankOne, 0, "rank-one argument, G a multiple of yy*")));
                }
            } else if lo - hi > RANK_ONE_MARGIN {
                return Ok(Some(self.decided(
                    Verdict::No,
                    None,
                    Route::RankOne,
                    0,
                    format!("rank-one argument: t = {s:.6} exceeds m(B, y) + m(I - B, y) = {:.6}", m1 + m2),
                )));
            }
        }
        Ok(None)
    }
}

const RANK_ONE_MARGIN: f64 = 1e-6;

/// Upper bound for `max{s : s yy* <= X}` with `X >= 0`, `y` a unit vector.
/// Eigenvalues are floored at the tolerance, which can only enlarge `X`.
fn max_multiple_below(x: &HermitianMatrix, y: &crate::matrixcore::CVector, tol: &Tolerance) -> Result<f64> {
    let sd = eig_hermitian(x, tol)?;
    let eps = tol.effective(1.0);
    let mut denom = 0.0;
    for k in 0..sd.dim() {
        let w = sd.eigenvector(k).dotc(y).norm_sqr();
        denom += w / sd.eigenvalues[k].max(eps);
    }
    Ok(1.0 / denom)
}

/// Dykstra's method for the primal constraints on `G`.
struct PrimalSolver {
    x: HermitianMatrix,
    incr: [HermitianMatrix; 4],
}

impl PrimalSolver {
    fn new(p: &Problem) -> Self {
        let start = &(p.a.matrix() + p.b.matrix()).scale(0.5) - &HermitianMatrix::scalar(p.n, 0.25);
        PrimalSolver {
            x: start,
            incr: std::array::from_fn(|_| HermitianMatrix::zeros(p.n)),
        }
    }

    fn step(&mut self, p: &Problem) -> Result<()> {
        let t = &p.tol;
        let lower = p.lower();
        for k in 0..4 {
            let y = &self.x + &self.incr[k];
            let next = match k {
                0 => psd_part(&y, t)?,
                1 => p.a.matrix() - &psd_part(&(p.a.matrix() - &y), t)?,
                2 => p.b.matrix() - &psd_part(&(p.b.matrix() - &y), t)?,
                _ => &lower + &psd_part(&(&y - &lower), t)?,
            };
            self.incr[k] = &y - &next;
            self.x = next;
        }
        Ok(())
    }

    fn residual(&self, p: &Problem) -> f64 {
        let g = &self.x;
        [
            neg_violation(g),
            neg_violation(&(p.a.matrix() - g)),
            neg_violation(&(p.b.matrix() - g)),
            neg_violation(&(g - &p.lower())),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Dykstra's method for a Farkas certificate `(Z2, Z3, Z4)`: all psd,
/// `Z2 + Z3 - Z4 >= 0`, and `<Z2, A> + <Z3, B> + <Z4, I - A - B> <= -1`.
/// Any such tuple makes the primal system infeasible.
struct DualSolver {
    z: [HermitianMatrix; 3],
    incr: [[HermitianMatrix; 3]; 3],
    costs: [HermitianMatrix; 3],
    cost_norm2: f64,
}

fn inner(x: &HermitianMatrix, y: &HermitianMatrix) -> f64 {
    x.matrix().dotc(y.matrix()).re
}

fn add3(x: &[HermitianMatrix; 3], y: &[HermitianMatrix; 3]) -> [HermitianMatrix; 3] {
    std::array::from_fn(|i| &x[i] + &y[i])
}

fn sub3(x: &[HermitianMatrix; 3], y: &[HermitianMatrix; 3]) -> [HermitianMatrix; 3] {
    std::array::from_fn(|i| &x[i] - &y[i])
}

impl DualSolver {
    fn new(p: &Problem) -> Self {
        let costs = [
            p.a.matrix().clone(),
            p.b.matrix().clone(),
            &HermitianMatrix::identity(p.n) - &(p.a.matrix() + p.b.matrix()),
        ];
        let cost_norm2 = costs.iter().map(|c| inner(c, c)).sum();
        let zero = || HermitianMatrix::zeros(p.n);
        DualSolver {
            z: std::array::from_fn(|_| zero()),
            incr: std::array::from_fn(|_| std::array::from_fn(|_| zero())),
            costs,
            cost_norm2,
        }
    }

    fn value(&self, z: &[HermitianMatrix; 3]) -> f64 {
        z.iter().zip(&self.costs).map(|(zi, ci)| inner(zi, ci)).sum()
    }

    fn project(&self, k: usize, y: &[HermitianMatrix; 3], tol: &Tolerance) -> Result<[HermitianMatrix; 3]> {
        Ok(match k {
            0 => [psd_part(&y[0], tol)?, psd_part(&y[1], tol)?, psd_part(&y[2], tol)?],
            1 => {
                // the map Z -> Z2 + Z3 - Z4 has L L* = 3 I
                let l = &(&y[0] + &y[1]) - &y[2];
                let neg = &l - &psd_part(&l, tol)?;
                let d = neg.scale(1.0 / 3.0);
                [&y[0] - &d, &y[1] - &d, &y[2] + &d]
            }
            _ => {
                let v = self.value(y);
                if v <= -1.0 || self.cost_norm2 == 0.0 {
                    y.clone()
                } else {
                    let s = (v + 1.0) / self.cost_norm2;
                    std::array::from_fn(|i| &y[i] - &self.costs[i].scale(s))
                }
            }
        })
    }

    fn step(&mut self, tol: &Tolerance) -> Result<()> {
        for k in 0..3 {
            let y = add3(&self.z, &self.incr[k]);
            let next = self.project(k, &y, tol)?;
            self.incr[k] = sub3(&y, &next);
            self.z = next;
        }
        Ok(())
    }

    /// Repairs the current iterate into an exact certificate and returns its
    /// normalized value when that is safely negative.
    fn certificate(&self, p: &Problem) -> Result<Option<f64>> {
        let t = &p.tol;
        let mut z = [
            psd_part(&self.z[0], t)?,
            psd_part(&self.z[1], t)?,
            psd_part(&self.z[2], t)?,
        ];
        let z1 = &(&z[0] + &z[1]) - &z[2];
        let delta = neg_violation(&z1);
        z[0] = &z[0] + &HermitianMatrix::scalar(p.n, delta);
        let mass: f64 = z.iter().map(|m| m.trace()).sum();
        if mass <= 0.0 {
            return Ok(None);
        }
        let v = self.value(&z) / mass;
        Ok((v < -10.0 * t.effective(1.0)).then_some(v))
    }
}

/// Decides whether `A` and `B` are parts of one observable. `No` is only
/// returned from an exact argument; solver stalls give `Unknown`.
pub fn coexistent(a: &Effect, b: &Effect, cfg: &CoexistenceConfig) -> Result<CoexistenceDecision> {
    a.matrix().same_dim(b.matrix())?;
    let p = Problem {
        a,
        b,
        tol: cfg.tol,
        n: a.dim(),
    };
    p.tol.check_dim(p.n)?;
    if let Some(d) = p.scalar_route() {
        return Ok(d);
    }
    if let Some(d) = p.projection_route()? {
        return Ok(d);
    }
    if let Some(d) = p.commuting_route()? {
        return Ok(d);
    }
    if let Some(d) = p.rank_one_route()? {
        return Ok(d);
    }

    let mut primal = PrimalSolver::new(&p);
    let mut dual = DualSolver::new(&p);
    let target = p.tol.effective(1.0);
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        primal.step(&p)?;
        dual.step(&p.tol)?;
        if it % 10 != 0 && it != cfg.max_iterations && it > 10 {
            continue;
        }
        residual = primal.residual(&p);
        if residual < target {
            if let Some(w) = p.witness_from(&primal.x) {
                return Ok(p.decided(Verdict::Yes, Some(w), Route::Dykstra, it, "alternating projections converged"));
            }
        }
        if let Some(v) = dual.certificate(&p)? {
            return Ok(p.decided(
                Verdict::No,
                None,
                Route::DualCertificate,
                it,
                format!("infeasibility certificate with normalized value {v:.3e}"),
            ));
        }
    }
    Ok(CoexistenceDecision {
        verdict: Verdict::Unknown,
        witness: None,
        iterations: cfg.max_iterations,
        residual,
        route: Route::Dykstra,
        reason: "iteration cap reached".into(),
    })
}

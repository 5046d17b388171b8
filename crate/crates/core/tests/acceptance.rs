//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{
    conj, edge_biased_unit, from_eigen, grid_margin, le_cholesky, max_entry, psd_cholesky, rotated_diag,
    sqrt_denman_beavers, svd_rank, GRID_SLACK,
};
use num_complex::Complex64;
use rand::Rng;
use symlab::commutant::{adversarial_partner, bicommutant_rank_one_test, second_commutant_projections};
use symlab::effects::{coexistent, geometric_mean, sequential_product, CoexistenceConfig, Effect, Verdict};
use symlab::matrixcore::random::{
    random_density_with, random_effect_with, random_hermitian_with, random_invertible_with, random_projection_with,
    random_unit_vector, random_unitary_with, rng_from_seed, SeededRng,
};
use symlab::matrixcore::{CMatrix, CVector, HermitianMatrix, Tolerance};
use symlab::orderrel::{dagger_check, is_adjacent};
use symlab::projective::{
    gleason_fit, optimal_wigner_reconstruct, semilinear_reconstruct, tomography_family, transition_probability,
    FrameSample, ProbeConfig, ProjectivePoint, Projection,
};
use symlab::reconstruct::{
    hermitian_commutativity_reconstruct, order_auto_reconstruct, proj_commutativity_reconstruct, CommutativityConfig,
};
use symlab::symmetry::{molnar_automorphism, molnar_tau, molnar_tau_by_composition, SymmetryDescriptor};
use symlab::Error;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn haar(n: usize, rng: &mut SeededRng) -> CMatrix {
    random_unitary_with(n, rng)
}

fn uniform(n: usize, lo: f64, hi: f64, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..=hi)).collect()
}

fn herm(m: CMatrix) -> HermitianMatrix {
    HermitianMatrix::from_matrix(m).unwrap()
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

// 1. adjacency and the dagger condition

fn criterion_dagger() -> Check {
    let t = tol();
    let mut witnesses = 0;
    for n in [2usize, 3, 4] {
        for i in 0..1000u64 {
            let mut rng = rng_from_seed(10_000 * n as u64 + i);
            let a = random_hermitian_with(n, &mut rng);
            let w = haar(n, &mut rng);
            let sign = if i % 8 < 4 { 1.0 } else { -1.0 };
            let kind = i % 4;
            let d: Vec<f64> = match kind {
                0 => (0..n).map(|k| if k == 0 { sign * rng.random_range(0.1..2.0) } else { 0.0 }).collect(),
                1 => {
                    let r = rng.random_range(2..=n);
                    (0..n).map(|k| if k < r { sign * rng.random_range(0.1..2.0) } else { 0.0 }).collect()
                }
                2 => (0..n)
                    .map(|k| match k {
                        0 => rng.random_range(0.1..2.0),
                        1 => -rng.random_range(0.1..2.0),
                        _ => rng.random_range(-2.0..2.0),
                    })
                    .collect(),
                _ => uniform(n, -2.0, 2.0, &mut rng),
            };
            let delta = from_eigen(&w, &d);
            let b = &a + &delta;
            let truly_adjacent = svd_rank(delta.matrix(), 1e-8) == 1;
            let adj = is_adjacent(&a, &b, &t).map_err(|e| e.to_string())?;
            let v = dagger_check(&a, &b, &t).map_err(|e| e.to_string())?;
            ensure(adj == truly_adjacent, || format!("n={n} trial {i}: is_adjacent {adj}, rank oracle {truly_adjacent}"))?;
            ensure(adj == v.satisfies_dagger(), || format!("n={n} trial {i}: adjacency {adj} vs dagger {}", v.satisfies_dagger()))?;
            if let Some((p, q)) = &v.witness {
                witnesses += 1;
                let (lo, hi) = if le_cholesky(&a, &b, 1e-9) { (&a, &b) } else { (&b, &a) };
                let slack = 1e-9 * hi.spectral_norm().max(1.0);
                for x in [p, q] {
                    ensure(le_cholesky(lo, x, slack) && le_cholesky(x, hi, slack), || format!("n={n} trial {i}: witness not between"))?;
                }
                ensure(!le_cholesky(p, q, 1e-9) && !le_cholesky(q, p, 1e-9), || format!("n={n} trial {i}: witness comparable"))?;
            }
        }
    }
    Ok(format!("3000 pairs, {witnesses} witnesses checked"))
}

// 2. the Molnar automorphism

/// `Phi(A)` by hand from the spectral data of `T = W diag(t) W*`.
fn molnar_by_hand(w: &CMatrix, t: &[f64], a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let id = CMatrix::identity(n, n);
    let tm = from_eigen(w, t).into_matrix();
    let inner = (&id + a).try_inverse().unwrap();
    let tau = (&id - &tm * &tm + &tm * inner * &tm).try_inverse().unwrap() - &id;
    let root: Vec<f64> = t.iter().map(|x| (2.0 - x * x).sqrt() / x).collect();
    let r = from_eigen(w, &root).into_matrix();
    &r * tau * &r
}

fn criterion_molnar() -> Check {
    let tl = tol();
    let (mut worst_order, mut worst_formula, mut worst_chain, mut worst_end) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for n in 2..=5usize {
        let mut rng = rng_from_seed(200 + n as u64);
        let w = haar(n, &mut rng);
        let tv = uniform(n, 0.1, 1.0, &mut rng);
        let te = Effect::new(from_eigen(&w, &tv), &tl).unwrap();
        let phi = |x: &HermitianMatrix| molnar_automorphism(&te, &Effect::new(x.clone(), &tl).unwrap(), &tl).unwrap().into_matrix();
        let id = HermitianMatrix::identity(n);
        worst_end = worst_end.max(phi(&HermitianMatrix::zeros(n)).spectral_norm());
        worst_end = worst_end.max(phi(&id).distance(&id));
        for _ in 0..500 {
            let v = haar(n, &mut rng);
            let av: Vec<f64> = (0..n).map(|_| edge_biased_unit(&mut rng)).collect();
            let a = from_eigen(&v, &av);
            let root: Vec<f64> = av.iter().map(|x| (1.0 - x).sqrt()).collect();
            let r = from_eigen(&v, &root);
            let cm = random_effect_with(n, &mut rng);
            let b = herm(r.matrix() * cm.matrix() * r.matrix() + a.matrix());
            let (pa, pb) = (phi(&a), phi(&b));
            let gap = pb.matrix() - pa.matrix();
            let min_eig = herm(gap.clone()).eigenvalues()[0];
            worst_order = worst_order.max((-min_eig).max(0.0));
            ensure(psd_cholesky(&gap, 1e-7), || format!("n={n}: order not preserved, min eigenvalue {min_eig:e}"))?;
            worst_formula = worst_formula.max(rel(pa.matrix(), &molnar_by_hand(&w, &tv, a.matrix())));
            let ae = Effect::new(a.clone(), &tl).unwrap();
            let closed = molnar_tau(&te, &ae, &tl).unwrap();
            let chain = molnar_tau_by_composition(&te, &ae, &tl).unwrap();
            worst_chain = worst_chain.max(closed.matrix().distance(&chain));
        }
    }
    ensure(worst_order <= 1e-7, || format!("order residual {worst_order:e}"))?;
    ensure(worst_end <= 1e-9, || format!("endpoint defect {worst_end:e}"))?;
    ensure(worst_chain <= 1e-7, || format!("chain residual {worst_chain:e}"))?;
    ensure(worst_formula <= 1e-8, || format!("formula mismatch {worst_formula:e}"))?;
    Ok(format!(
        "order {worst_order:.1e}, endpoints {worst_end:.1e}, chain {worst_chain:.1e}, hand formula {worst_formula:.1e}"
    ))
}

// 3. second commutant cardinalities

/// `2^d` with `d = dim span{I, P, Q, PQ}` for commuting `P, Q`.
fn abelian_projection_count(p: &HermitianMatrix, q: &HermitianMatrix) -> usize {
    let n = p.dim();
    let pq = p.matrix() * q.matrix();
    let comm = (&pq - q.matrix() * p.matrix()).norm();
    assert!(comm < 1e-9, "partner does not commute");
    let mut m = CMatrix::zeros(n * n, 4);
    for (k, x) in [CMatrix::identity(n, n), p.matrix().clone(), q.matrix().clone(), pq].iter().enumerate() {
        for (idx, z) in x.iter().enumerate() {
            m[(idx, k)] = *z;
        }
    }
    1 << svd_rank(&m, 1e-8)
}

fn criterion_cardinality() -> Check {
    let t = tol();
    let mut rng = rng_from_seed(31);
    for trial in 0..20 {
        let p = Projection::new(random_projection_with(3, 1, &mut rng).unwrap(), &t).unwrap();
        let q = adversarial_partner(&p, &t).map_err(|e| e.to_string())?;
        let got = second_commutant_projections(&p, &q, &t).map_err(|e| e.to_string())?.len();
        let want = abelian_projection_count(p.matrix(), q.matrix());
        ensure(got == 8 && want == 8, || format!("rank-one trial {trial}: {got} elements, oracle {want}"))?;
    }
    let p = Projection::new(HermitianMatrix::diag(&[1.0, 1.0, 0.0, 0.0]), &t).unwrap();
    let q = Projection::new(HermitianMatrix::diag(&[1.0, 0.0, 1.0, 0.0]), &t).unwrap();
    let got = second_commutant_projections(&p, &q, &t).map_err(|e| e.to_string())?.len();
    ensure(got == 16 && abelian_projection_count(p.matrix(), q.matrix()) == 16, || format!("n=4 construction: {got}"))?;
    let mut checked = 0;
    for n in [3usize, 4, 5] {
        for r in 1..n {
            for i in 0..200u64 {
                let mut rr = rng_from_seed(1_000_000 * n as u64 + 1000 * r as u64 + i);
                let p = Projection::new(random_projection_with(n, r, &mut rr).unwrap(), &t).unwrap();
                let claimed = bicommutant_rank_one_test(&p, 4, i, &t).map_err(|e| e.to_string())?;
                let truth = r == 1 || r == n - 1;
                ensure(claimed == truth, || format!("n={n} rank {r} trial {i}: claimed {claimed}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("8 and 16 confirmed, {checked} projections classified without error"))
}

// 4. Wigner and Uhlhorn reconstruction

fn hidden_point_oracle(u: CMatrix, conjugates: bool) -> impl FnMut(&ProjectivePoint) -> symlab::Result<ProjectivePoint> {
    move |p: &ProjectivePoint| {
        let x = if conjugates { p.vector().map(|z| z.conj()) } else { p.vector().clone() };
        ProjectivePoint::new(&u * x, &tol())
    }
}

fn overlap(hat: &CMatrix, u0: &CMatrix) -> f64 {
    (hat.adjoint() * u0).trace().norm()
}

fn criterion_wigner() -> Check {
    let mut worst = 0.0_f64;
    let mut min_trace = f64::INFINITY;
    for n in 3..=6usize {
        for i in 0..100u64 {
            let conjugates = i >= 50;
            let mut rng = rng_from_seed(4000 + 1000 * n as u64 + i);
            let u0 = haar(n, &mut rng);
            let mut o = hidden_point_oracle(u0.clone(), conjugates);
            let fit = semilinear_reconstruct(&mut o, n, &ProbeConfig::with_seed(i)).map_err(|e| format!("n={n} trial {i}: {e}"))?;
            let gap = n as f64 - overlap(fit.operator.matrix(), &u0);
            worst = worst.max(gap);
            ensure(fit.operator.conjugates() == conjugates, || format!("n={n} trial {i}: wrong conjugation flag"))?;
            ensure(gap <= 1e-6, || format!("n={n} trial {i}: overlap gap {gap:e}"))?;
        }
        for i in 0..6u64 {
            let conjugates = i % 2 == 1;
            let mut rng = rng_from_seed(9000 + 100 * n as u64 + i);
            let u0 = haar(n, &mut rng);
            let mut o = hidden_point_oracle(u0.clone(), conjugates);
            let fit = optimal_wigner_reconstruct(&mut o, n, &ProbeConfig::with_seed(i)).map_err(|e| format!("optimal n={n}: {e}"))?;
            min_trace = min_trace.min(fit.min_gleason_trace);
            ensure(fit.min_gleason_trace >= 1.0 - 1e-8, || format!("optimal n={n}: tr(E_Q Q) = {}", fit.min_gleason_trace))?;
            ensure(n as f64 - overlap(fit.fit.operator.matrix(), &u0) <= 1e-6, || format!("optimal n={n}: operator not recovered"))?;
        }
    }
    Ok(format!("400 ground truths, worst overlap gap {worst:.1e}; optimal pipeline min tr(E_Q Q) {min_trace:.12}"))
}

// 5. Gleason fit

fn criterion_gleason() -> Check {
    let t = tol();
    let (mut worst, mut worst_frame) = (0.0_f64, 0.0_f64);
    for i in 0..200u64 {
        let n = 2 + (i % 4) as usize;
        let mut rng = rng_from_seed(5000 + i);
        let d0 = random_density_with(n, &mut rng);
        let mut sample = FrameSample::new(Vec::new());
        for p in tomography_family(n) {
            let x = p.vector();
            let value = (x.adjoint() * d0.matrix() * x)[(0, 0)].re;
            sample.push(p, value);
        }
        let d = gleason_fit(&sample, n, &t).map_err(|e| format!("trial {i}: {e}"))?;
        worst = worst.max(max_entry(d.matrix(), d0.matrix()));
        for _ in 0..5 {
            let w = haar(n, &mut rng);
            let total: f64 = (0..n)
                .map(|k| {
                    let x: CVector = w.column(k).into_owned();
                    (x.adjoint() * d.matrix() * &x)[(0, 0)].re
                })
                .sum();
            worst_frame = worst_frame.max((total - 1.0).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("max entry error {worst:e}"))?;
    ensure(worst_frame <= 1e-9, || format!("frame sum error {worst_frame:e}"))?;
    Ok(format!("200 densities, max entry error {worst:.1e}, frame sums within {worst_frame:.1e}"))
}

// 6. order automorphism reconstruction

fn criterion_order_auto() -> Check {
    let t = tol();
    let (mut worst_probe, mut worst_shift, mut worst_gauge) = (0.0_f64, 0.0_f64, 0.0_f64);
    for n in [2usize, 3, 4] {
        for i in 0..50u64 {
            let mut rng = rng_from_seed(6000 + 100 * n as u64 + i);
            let t0 = random_invertible_with(n, &mut rng);
            let s0 = random_hermitian_with(n, &mut rng);
            let transpose = i % 2 == 1;
            let apply = |a: &CMatrix| -> CMatrix {
                let x = if transpose { a.transpose() } else { a.clone() };
                &t0 * x * t0.adjoint() + s0.matrix()
            };
            let mut o = |a: &HermitianMatrix| Ok(herm(apply(a.matrix())));
            let r = order_auto_reconstruct(&mut o, n, &ProbeConfig::with_seed(i)).map_err(|e| format!("n={n} trial {i}: {e}"))?;
            let SymmetryDescriptor::Congruence { t: th, conjugates, shift, sign } = &r.descriptor else {
                return Err(format!("n={n} trial {i}: unexpected descriptor"));
            };
            ensure(*conjugates == transpose && *sign == 1.0, || format!("n={n} trial {i}: wrong flag or sign"))?;
            worst_shift = worst_shift.max(max_entry(shift.matrix(), s0.matrix()));
            let mut vr = rng_from_seed(66_000 + i);
            for _ in 0..100 {
                let a = random_hermitian_with(n, &mut vr);
                let want = apply(a.matrix());
                let got = r.descriptor.apply(&a, &t).map_err(|e| e.to_string())?;
                worst_probe = worst_probe.max(rel(got.matrix(), &want));
                let x = if transpose { a.matrix().transpose() } else { a.matrix().clone() };
                worst_gauge = worst_gauge.max(rel(&(th * &x * th.adjoint()), &(&t0 * &x * t0.adjoint())));
            }
        }
    }
    ensure(worst_probe <= 1e-6, || format!("probe residual {worst_probe:e}"))?;
    ensure(worst_shift <= 1e-8, || format!("shift error {worst_shift:e}"))?;
    ensure(worst_gauge <= 1e-7, || format!("gauge law residual {worst_gauge:e}"))?;
    Ok(format!("150 triples, probes {worst_probe:.1e}, S {worst_shift:.1e}, gauge {worst_gauge:.1e}"))
}

// 7. commutativity preservers

type Oracle = Box<dyn FnMut(&HermitianMatrix) -> symlab::Result<HermitianMatrix>>;

fn projection_adversaries(n: usize) -> Vec<(&'static str, Oracle)> {
    let e1 = ProjectivePoint::basis(n, 0).projector();
    let mut plus = CMatrix::zeros(n, n);
    for i in 0..2 {
        for j in 0..2 {
            plus[(i, j)] = c(0.5);
        }
    }
    let plus = herm(plus);
    let (a, b) = (e1.clone(), plus.clone());
    let swap: Oracle = Box::new(move |p| {
        Ok(if p.distance(&a) < 1e-9 {
            b.clone()
        } else if p.distance(&b) < 1e-9 {
            a.clone()
        } else {
            p.clone()
        })
    });
    let fixed = e1.clone();
    vec![
        ("noncommuting swap", swap),
        ("constant", Box::new(move |_| Ok(fixed.clone()))),
        ("halve", Box::new(|p| Ok(p.scale(0.5)))),
        ("zero", Box::new(|p| Ok(HermitianMatrix::zeros(p.dim())))),
        // conjugation on rank-one inputs only
        ("partial transpose", Box::new(|p| Ok(if (p.trace() - 1.0).abs() < 1e-9 { p.transpose() } else { p.clone() }))),
    ]
}

fn hermitian_adversaries(n: usize) -> Vec<(&'static str, Oracle, Vec<HermitianMatrix>)> {
    let mut rng = rng_from_seed(77);
    let ramp: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let fixed = HermitianMatrix::diag(&ramp);
    let shift = fixed.clone();
    let x = random_hermitian_with(n, &mut rng);
    let (u1, u2) = (haar(n, &mut rng), haar(n, &mut rng));
    let mut pm = vec![0.0; n];
    pm[0] = 1.0;
    pm[1] = -1.0;
    vec![
        ("constant", Box::new(move |_: &HermitianMatrix| Ok(fixed.clone())) as Oracle, vec![]),
        ("nonscalar shift", Box::new(move |a: &HermitianMatrix| Ok(a + &shift)), vec![]),
        (
            "perturbation",
            Box::new(move |a: &HermitianMatrix| {
                let ax = a.matrix() * x.matrix();
                Ok(herm(a.matrix() + (&ax + ax.adjoint()) * c(0.1)))
            }),
            vec![],
        ),
        (
            "spectrum-dependent unitary",
            Box::new(move |a: &HermitianMatrix| {
                let ev = a.eigenvalues();
                let distinct = 1 + ev.windows(2).filter(|w| w[1] - w[0] > 1e-6).count();
                let u = if distinct <= 2 { &u1 } else { &u2 };
                Ok(herm(u * a.matrix() * u.adjoint()))
            }),
            vec![],
        ),
        (
            "square",
            Box::new(|a: &HermitianMatrix| Ok(herm(a.matrix() * a.matrix()))),
            vec![HermitianMatrix::diag(&pm)],
        ),
    ]
}

fn criterion_commutativity() -> Check {
    let mut worst_table = 0.0_f64;
    let mut tables = 0;
    for n in [3usize, 4] {
        for i in 0..6u64 {
            let conjugates = i % 2 == 1;
            let mut rng = rng_from_seed(7000 + 10 * n as u64 + i);
            let u0 = haar(n, &mut rng);
            let act = move |a: &CMatrix| {
                let x = if conjugates { conj(a) } else { a.clone() };
                &u0 * x * u0.adjoint()
            };
            let id = CMatrix::identity(n, n);
            let mut herm_oracle = |a: &HermitianMatrix| Ok(herm(act(&(a.matrix() * c(2.0) + &id))));
            let (r, ts) = hermitian_commutativity_reconstruct(&mut herm_oracle, n, &CommutativityConfig::with_seed(i))
                .map_err(|e| format!("herm n={n} trial {i}: {e}"))?;
            let SymmetryDescriptor::UnitarySimilarity(u) = &r.descriptor else {
                return Err("unexpected descriptor".into());
            };
            ensure(u.conjugates() == conjugates, || format!("herm n={n} trial {i}: wrong flag"))?;
            ensure(ts.len() >= 20, || format!("herm n={n}: only {} tables", ts.len()))?;
            for table in &ts {
                tables += 1;
                for &(x, fx) in table.table.entries() {
                    worst_table = worst_table.max((fx - (2.0 * x + 1.0)).abs());
                }
            }
            let mut proj_oracle = |p: &HermitianMatrix| Ok(herm(act(p.matrix())));
            let (r, _) = proj_commutativity_reconstruct(&mut proj_oracle, n, &CommutativityConfig::with_seed(i))
                .map_err(|e| format!("proj n={n} trial {i}: {e}"))?;
            let SymmetryDescriptor::UnitarySimilarity(u) = &r.descriptor else {
                return Err("unexpected descriptor".into());
            };
            ensure(u.conjugates() == conjugates, || format!("proj n={n} trial {i}: wrong flag"))?;
        }
        for (name, mut o) in projection_adversaries(n) {
            let res = proj_commutativity_reconstruct(&mut o, n, &CommutativityConfig::with_seed(1));
            ensure(matches!(res, Err(Error::OracleNotInClass { .. })), || format!("proj adversary `{name}` at n={n}: {:?}", res.err()))?;
        }
        for (name, mut o, extra) in hermitian_adversaries(n) {
            let mut cfg = CommutativityConfig::with_seed(1);
            cfg.extra_probes = extra;
            let res = hermitian_commutativity_reconstruct(&mut o, n, &cfg);
            ensure(matches!(res, Err(Error::OracleNotInClass { .. })), || format!("herm adversary `{name}` at n={n}: {:?}", res.err()))?;
        }
    }
    ensure(worst_table <= 1e-7, || format!("table deviation {worst_table:e}"))?;
    Ok(format!("{tables} tables within {worst_table:.1e} of 2x+1; 20 adversaries rejected"))
}

// 8. coexistence

fn witness_valid(a: &Effect, b: &Effect, w: &symlab::effects::CoexistenceWitness) -> bool {
    let (e, f, g) = (w.e.matrix().matrix(), w.f.matrix().matrix(), w.g.matrix().matrix());
    let n = e.nrows();
    let slack = 1e-8;
    max_entry(&(e + g), a.matrix().matrix()) <= slack
        && max_entry(&(f + g), b.matrix().matrix()) <= slack
        && psd_cholesky(e, slack)
        && psd_cholesky(f, slack)
        && psd_cholesky(g, slack)
        && psd_cholesky(&(CMatrix::identity(n, n) - e - f - g), slack)
}

fn criterion_coexistence() -> Check {
    let t = tol();
    let cfg = CoexistenceConfig::default();
    let eff = |m: HermitianMatrix| Effect::new(m, &t).unwrap();
    for i in 0..500u64 {
        let mut rng = rng_from_seed(8000 + i);
        let n = 2 + (i % 3) as usize;
        let w = haar(n, &mut rng);
        let a = eff(from_eigen(&w, &uniform(n, 0.0, 1.0, &mut rng)));
        let b = eff(from_eigen(&w, &uniform(n, 0.0, 1.0, &mut rng)));
        let d = coexistent(&a, &b, &cfg).map_err(|e| e.to_string())?;
        ensure(d.verdict == Verdict::Yes && d.witness.as_ref().is_some_and(|x| witness_valid(&a, &b, x)), || format!("commuting trial {i}: {:?}", d.verdict))?;

        let p = random_projection_with(n, rng.random_range(1..n), &mut rng).unwrap();
        let q = random_projection_with(n, rng.random_range(1..n), &mut rng).unwrap();
        let comm = (p.matrix() * q.matrix() - q.matrix() * p.matrix()).norm();
        let d = coexistent(&eff(p), &eff(q), &cfg).map_err(|e| e.to_string())?;
        ensure(comm < 1e-6 || d.verdict == Verdict::No, || format!("projection trial {i}: {:?}", d.verdict))?;

        let s = rng.random_range(0.0..1.0);
        let x = eff(random_effect_with(n, &mut rng));
        let d = coexistent(&eff(HermitianMatrix::scalar(n, s)), &x, &cfg).map_err(|e| e.to_string())?;
        let w = d.witness.as_ref().ok_or("scalar pair without witness")?;
        ensure(d.verdict == Verdict::Yes && witness_valid(&eff(HermitianMatrix::scalar(n, s)), &x, w), || format!("scalar trial {i}"))?;
        ensure(max_entry(w.g.matrix().matrix(), &(x.matrix().matrix() * c(s))) <= 1e-12, || format!("scalar trial {i}: G is not tB"))?;
    }

    let mut rng = rng_from_seed(2024);
    let (mut agree, mut seen) = (0, 0);
    while agree < 100 {
        seen += 1;
        if seen > 5000 {
            return Err("too few decisive grid instances".into());
        }
        let a = rotated_diag(edge_biased_unit(&mut rng), edge_biased_unit(&mut rng), rng.random_range(0.0..3.2));
        let b = rotated_diag(edge_biased_unit(&mut rng), edge_biased_unit(&mut rng), rng.random_range(0.0..3.2));
        let margin = grid_margin(&a, &b);
        let oracle = if margin >= 0.0 {
            Verdict::Yes
        } else if margin < -GRID_SLACK - 1e-3 {
            Verdict::No
        } else {
            continue;
        };
        let d = coexistent(&eff(a), &eff(b), &cfg).map_err(|e| e.to_string())?;
        if d.verdict == Verdict::Unknown {
            continue;
        }
        ensure(d.verdict == oracle, || format!("grid disagreement at margin {margin}"))?;
        agree += 1;
    }

    let mut unknown = 0;
    let mut rng = rng_from_seed(88);
    for _ in 0..200 {
        let a = eff(random_effect_with(2, &mut rng));
        let b = eff(random_effect_with(2, &mut rng));
        if coexistent(&a, &b, &cfg).map_err(|e| e.to_string())?.verdict == Verdict::Unknown {
            unknown += 1;
        }
    }
    let rate = unknown as f64 / 200.0;
    ensure(rate < 0.2, || format!("unknown rate {rate}"))?;
    Ok(format!("1500 structured pairs, grid agreement 100/100, unknown rate {rate:.3}"))
}

// 9. products and means

fn criterion_products() -> Check {
    let t = tol();
    let (mut worst_sym, mut worst_cong, mut worst_riccati) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..500u64 {
        let n = 2 + (i % 5) as usize;
        let mut rng = rng_from_seed(9100 + i);
        let a = from_eigen(&haar(n, &mut rng), &uniform(n, 0.1, 3.0, &mut rng));
        let b = from_eigen(&haar(n, &mut rng), &uniform(n, 0.1, 3.0, &mut rng));
        let m = random_invertible_with(n, &mut rng);
        let g = geometric_mean(&a, &b, &t).map_err(|e| e.to_string())?;
        worst_sym = worst_sym.max(rel(g.matrix(), geometric_mean(&b, &a, &t).unwrap().matrix()));
        let lhs = &m * g.matrix() * m.adjoint();
        let rhs = geometric_mean(&a.congruence(&m), &b.congruence(&m), &t).unwrap();
        worst_cong = worst_cong.max(rel(&lhs, rhs.matrix()));
        // G A^{-1} G = B
        let ric = g.matrix() * a.matrix().clone().try_inverse().unwrap() * g.matrix();
        worst_riccati = worst_riccati.max(rel(&ric, b.matrix()));
    }
    ensure(worst_sym <= 1e-7 && worst_cong <= 1e-7 && worst_riccati <= 1e-7, || {
        format!("symmetry {worst_sym:e}, congruence {worst_cong:e}, riccati {worst_riccati:e}")
    })?;

    let mut worst_seq = 0.0_f64;
    for i in 0..1000u64 {
        let n = 2 + (i % 4) as usize;
        let mut rng = rng_from_seed(9500 + i);
        let a = from_eigen(&haar(n, &mut rng), &uniform(n, 0.05, 1.0, &mut rng));
        let b = random_effect_with(n, &mut rng);
        let p = sequential_product(&Effect::new(a.clone(), &t).unwrap(), &Effect::new(b.clone(), &t).unwrap(), &t)
            .map_err(|e| e.to_string())?;
        let pm = p.matrix().matrix();
        let id = CMatrix::identity(n, n);
        ensure(psd_cholesky(pm, 1e-10) && psd_cholesky(&(&id - pm), 1e-10), || format!("seqprod trial {i} left the effects"))?;
        let r = sqrt_denman_beavers(a.matrix());
        worst_seq = worst_seq.max(max_entry(pm, &(&r * b.matrix() * &r)));
    }
    ensure(worst_seq <= 1e-8, || format!("seqprod vs reference {worst_seq:e}"))?;

    let mut worst_tp = 0.0_f64;
    for i in 0..500u64 {
        let n = 2 + (i % 5) as usize;
        let mut rng = rng_from_seed(9900 + i);
        let (x, y) = (random_unit_vector(n, &mut rng), random_unit_vector(n, &mut rng));
        let u = haar(n, &mut rng);
        let (p, q) = (HermitianMatrix::outer(&x), HermitianMatrix::outer(&y));
        let before = transition_probability(&p, &q, &t).map_err(|e| e.to_string())?;
        let after = transition_probability(&p.congruence(&u), &q.congruence(&u), &t).map_err(|e| e.to_string())?;
        let by_hand = x.dotc(&y).norm_sqr();
        worst_tp = worst_tp.max((before - after).abs()).max((before - by_hand).abs());
    }
    ensure(worst_tp <= 1e-9, || format!("transition probability drift {worst_tp:e}"))?;
    Ok(format!(
        "geomean sym {worst_sym:.1e} cong {worst_cong:.1e}; seqprod {worst_seq:.1e}; transition {worst_tp:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("adjacency <=> dagger condition", criterion_dagger, 30),
        ("Molnar map preserves order", criterion_molnar, 60),
        ("second commutant cardinalities", criterion_cardinality, 60),
        ("Wigner/Uhlhorn reconstruction", criterion_wigner, 120),
        ("Gleason fit", criterion_gleason, 60),
        ("order automorphism reconstruction", criterion_order_auto, 60),
        ("commutativity preserver reconstruction", criterion_commutativity, 60),
        ("coexistence decision", criterion_coexistence, 120),
        ("product and mean identities", criterion_products, 60),
    ];
    let mut failed = 0;
    for (k, (name, run, bound)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*bound) => Err(format!("{msg}; took {:.1}s > {bound}s", elapsed.as_secs_f64())),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} [{:.1}s]", k + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} [{:.1}s]", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

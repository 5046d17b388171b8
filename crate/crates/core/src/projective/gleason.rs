use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrixcore::{basis_vector, c, is_psd, re, CMatrix, HermitianMatrix, Tolerance};

use super::ProjectivePoint;

/// Values of a candidate frame function on finitely many rays.
#[derive(Debug, Clone, Default)]
pub struct FrameSample {
    entries: Vec<(ProjectivePoint, f64)>,
}

impl FrameSample {
    pub fn new(entries: Vec<(ProjectivePoint, f64)>) -> Self {
        FrameSample { entries }
    }

    pub fn entries(&self) -> &[(ProjectivePoint, f64)] {
        &self.entries
    }

    pub fn push(&mut self, point: ProjectivePoint, value: f64) {
        self.entries.push((point, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `[e_i]`, `[(e_i + e_j)/sqrt 2]` and `[(e_i + i e_j)/sqrt 2]` for `i < j`:
/// `n^2` rays that determine a hermitian matrix through `tr(D P)`.
pub fn tomography_family(n: usize) -> Vec<ProjectivePoint> {
    let tol = Tolerance::default();
    let mut out: Vec<ProjectivePoint> = (0..n).map(|i| ProjectivePoint::basis(n, i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            for coef in [re(1.0), c(0.0, 1.0)] {
                let v = basis_vector(n, i) + basis_vector(n, j) * coef;
                out.push(ProjectivePoint::new(v, &tol).expect("nonzero"));
            }
        }
    }
    out
}

/// Forward model `P -> tr(D P)` on the tomography family.
pub fn frame_sample_from_density(d: &HermitianMatrix) -> FrameSample {
    FrameSample::new(
        tomography_family(d.dim())
            .into_iter()
            .map(|p| {
                let v = d.quadratic_form(p.vector());
                (p, v)
            })
            .collect(),
    )
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in row-major upper-triangle order
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Linear inversion of `tr(D P_k) = value_k` over the real basis of hermitian
/// matrices, followed by a consistency check of the fitted density.
pub fn gleason_fit(sample: &FrameSample, n: usize, tol: &Tolerance) -> Result<HermitianMatrix> {
    tol.check_dim(n)?;
    for (idx, p) in tomography_family(n).iter().enumerate() {
        let present = sample
            .entries()
            .iter()
            .any(|(q, _)| q.dim() == n && q.distance(p) <= 1e-9);
        if !present {
            return Err(Error::IncompleteSample(format!(
                "tomography ray #{idx} {:?}",
                p.vector().as_slice()
            )));
        }
    }
    let fit_tol = 100.0 * tol.effective(1.0);
    let pairs = n * (n - 1) / 2;
    let unknowns = n + 2 * pairs;
    let m = sample.len();
    let mut design = DMatrix::<f64>::zeros(m, unknowns);
    let mut rhs = DVector::<f64>::zeros(m);
    for (row, (p, value)) in sample.entries().iter().enumerate() {
        if !(-fit_tol..=1.0 + fit_tol).contains(value) {
            return Err(Error::InconsistentSample {
                residual: (value - value.clamp(0.0, 1.0)).abs(),
            });
        }
        let v = p.vector();
        rhs[row] = *value;
        for i in 0..n {
            design[(row, i)] = v[i].norm_sqr();
            for j in (i + 1)..n {
                let a = v[i].conj() * v[j];
                let k = pair_index(n, i, j);
                design[(row, n + k)] = 2.0 * a.re;
                design[(row, n + pairs + k)] = -2.0 * a.im;
            }
        }
    }
    let svd = design.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let residual = (&design * &x - &rhs).amax();

    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = re(x[i]);
        for j in (i + 1)..n {
            let k = pair_index(n, i, j);
            let z = c(x[n + k], x[n + pairs + k]);
            d[(i, j)] = z;
            d[(j, i)] = z.conj();
        }
    }
    let d = HermitianMatrix::from_matrix(d)?;
    let trace_defect = (d.trace() - 1.0).abs();
    let worst = residual.max(trace_defect);
    if worst > fit_tol || !is_psd(&d, &Tolerance { atol: fit_tol, ..*tol }) {
        return Err(Error::InconsistentSample {
            residual: worst.max(fit_tol * 1.0000001),
        });
    }
    Ok(d)
}

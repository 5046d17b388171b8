use std::ops::Range;

use nalgebra::SymmetricEigen;

use super::{phase_fix, CMatrix, CVector, HermitianMatrix, Tolerance};
use crate::error::{Error, Result};

/// Eigendecomposition `A = V diag(lambda) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: CMatrix,
    /// Consecutive index ranges of eigenvalues closer than `eig_cluster`.
    pub clusters: Vec<Range<usize>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::from_eigen(&self.eigenvectors, &self.eigenvalues)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Largest `|eigenvalue|`.
    pub fn norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Mean eigenvalue of every cluster.
    pub fn cluster_values(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .map(|r| self.eigenvalues[r.clone()].iter().sum::<f64>() / r.len() as f64)
            .collect()
    }

    /// Orthonormal basis of the `k`-th eigenspace cluster.
    pub fn cluster_basis(&self, k: usize) -> CMatrix {
        let r = &self.clusters[k];
        self.eigenvectors.columns(r.start, r.len()).into_owned()
    }

    pub fn cluster_projector(&self, k: usize) -> HermitianMatrix {
        HermitianMatrix::projector_onto(&self.cluster_basis(k))
    }

    /// Number of eigenvalues with modulus above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.eigenvalues.iter().filter(|x| x.abs() > threshold).count()
    }

    /// First within-cluster gap that is larger than `noise`: such a gap is too
    /// wide to be round-off yet too narrow to separate eigenvalues.
    pub fn ambiguous_gap(&self, noise: f64) -> Option<f64> {
        self.clusters.iter().find_map(|r| {
            self.eigenvalues[r.clone()]
                .windows(2)
                .map(|w| w[1] - w[0])
                .find(|&g| g > noise)
        })
    }
}

/// Eigendecomposition with deterministic ordering and eigenvector phases.
pub fn eig_hermitian(a: &HermitianMatrix, tol: &Tolerance) -> Result<SpectralDecomposition> {
    let n = a.dim();
    tol.check_dim(n)?;
    let max_iter = 10_000 + 1_000 * n;
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, max_iter)
        .ok_or_else(|| Error::NumericalFailure("hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    let mut eigenvectors = CMatrix::zeros(n, n);
    let floor = tol.phase_floor();
    for (k, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).into_owned();
        phase_fix(&mut v, floor);
        eigenvectors.set_column(k, &v);
    }

    let mut clusters = Vec::new();
    let mut start = 0;
    for k in 1..n {
        if eigenvalues[k] - eigenvalues[k - 1] > tol.eig_cluster {
            clusters.push(start..k);
            start = k;
        }
    }
    clusters.push(start..n);

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        clusters,
    })
}

/// `V diag(f(lambda_i)) V*`. `f` returns `None` where it is undefined.
pub fn spectral_apply<F>(a: &HermitianMatrix, tol: &Tolerance, f: F) -> Result<HermitianMatrix>
where
    F: Fn(f64) -> Option<f64>,
{
    let sd = eig_hermitian(a, tol)?;
    apply_to_decomposition(&sd, f)
}

pub(crate) fn apply_to_decomposition<F>(sd: &SpectralDecomposition, f: F) -> Result<HermitianMatrix>
where
    F: Fn(f64) -> Option<f64>,
{
    let values = sd
        .eigenvalues
        .iter()
        .map(|&x| match f(x) {
            Some(y) if y.is_finite() => Ok(y),
            _ => Err(Error::FunctionUndefinedOnSpectrum(x)),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(HermitianMatrix::from_eigen(&sd.eigenvectors, &values))
}

/// A finitely supported real function, given by `(argument, value)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralTable {
    entries: Vec<(f64, f64)>,
}

impl SpectralTable {
    pub fn new(mut entries: Vec<(f64, f64)>) -> Self {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        SpectralTable { entries }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value at the nearest argument within `width` of `x`.
    pub fn lookup(&self, x: f64, width: f64) -> Option<f64> {
        self.entries
            .iter()
            .filter(|(k, _)| (k - x).abs() <= width)
            .min_by(|a, b| (a.0 - x).abs().total_cmp(&(b.0 - x).abs()))
            .map(|&(_, v)| v)
    }

    /// True when distinct arguments map to values more than `width` apart.
    pub fn is_injective(&self, width: f64) -> bool {
        let mut vals: Vec<f64> = self.entries.iter().map(|e| e.1).collect();
        vals.sort_by(f64::total_cmp);
        vals.windows(2).all(|w| w[1] - w[0] > width)
    }

    /// Largest deviation from a reference function over the table.
    pub fn max_deviation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.entries
            .iter()
            .map(|&(k, v)| (f(k) - v).abs())
            .fold(0.0, f64::max)
    }
}

/// Applies a table function; each eigenvalue is matched within `eig_cluster`.
pub fn spectral_apply_table(
    a: &HermitianMatrix,
    table: &SpectralTable,
    tol: &Tolerance,
) -> Result<HermitianMatrix> {
    spectral_apply(a, tol, |x| table.lookup(x, tol.eig_cluster))
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> f64 {
    a.eigenvalues()[0]
}

/// `lambda_min(A) >= -(atol + rtol * ||A||)`.
pub fn is_psd(a: &HermitianMatrix, tol: &Tolerance) -> bool {
    let ev = a.eigenvalues();
    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
    ev[0] >= -tol.effective(norm)
}

/// `lambda_min(A) > atol + rtol * ||A||`.
pub fn is_pd(a: &HermitianMatrix, tol: &Tolerance) -> bool {
    let ev = a.eigenvalues();
    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
    ev[0] > tol.effective(norm)
}

/// Number of eigenvalues with modulus above the effective tolerance.
pub fn rank_tol(a: &HermitianMatrix, tol: &Tolerance) -> usize {
    let ev = a.eigenvalues();
    let norm = ev[0].abs().max(ev[ev.len() - 1].abs());
    let eps = tol.effective(norm);
    ev.iter().filter(|x| x.abs() > eps).count()
}

pub fn sqrt_psd(a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let sd = eig_hermitian(a, tol)?;
    if sd.min() < -tol.effective(sd.norm()) {
        return Err(Error::NotPsd { min_eig: sd.min() });
    }
    apply_to_decomposition(&sd, |x| Some(x.max(0.0).sqrt()))
}

pub fn inv(a: &HermitianMatrix, tol: &Tolerance) -> Result<HermitianMatrix> {
    let sd = eig_hermitian(a, tol)?;
    let min_abs = sd.eigenvalues.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if min_abs <= tol.effective(sd.norm()) {
        return Err(Error::SingularMatrix {
            min_abs_eig: min_abs,
        });
    }
    apply_to_decomposition(&sd, |x| Some(1.0 / x))
}

//! Commutation, joint spectral blocks and second commutants.

use std::cmp::Ordering;
use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrixcore::random::{random_hermitian_with, random_unitary_with, rng_from_seed};
use crate::matrixcore::{eig_hermitian, operator_norm, CMatrix, HermitianMatrix, SpectralTable, Tolerance};
use crate::projective::Projection;

/// Spectral norm of `AB - BA`.
pub fn commutator_norm(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    a.same_dim(b)?;
    let ab = a.mul_matrix(b);
    let ba = b.mul_matrix(a);
    Ok(operator_norm(&(ab - ba)))
}

pub fn commute(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    let norm = commutator_norm(a, b)?;
    Ok(norm <= tol.effective(a.spectral_norm() * b.spectral_norm()))
}

/// Common eigenbasis of commuting hermitian matrices, grouped into joint
/// eigenspaces.
#[derive(Debug, Clone)]
pub struct JointBlockStructure {
    pub basis: CMatrix,
    pub blocks: Vec<Range<usize>>,
    /// One eigenvalue per input matrix for every block.
    pub labels: Vec<Vec<f64>>,
}

impl JointBlockStructure {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|r| r.len()).collect()
    }

    pub fn block_basis(&self, k: usize) -> CMatrix {
        let r = &self.blocks[k];
        self.basis.columns(r.start, r.len()).into_owned()
    }

    pub fn block_projector(&self, k: usize) -> HermitianMatrix {
        HermitianMatrix::projector_onto(&self.block_basis(k))
    }

    /// Sum of the block projectors selected by `mask`.
    pub fn indicator_sum(&self, mask: &[bool]) -> HermitianMatrix {
        let n = self.dim();
        let mut d = vec![0.0; n];
        for (r, &on) in self.blocks.iter().zip(mask) {
            if on {
                for i in r.clone() {
                    d[i] = 1.0;
                }
            }
        }
        HermitianMatrix::from_eigen(&self.basis, &d)
    }

    /// Block index of every basis column.
    pub fn block_of_index(&self) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for (k, r) in self.blocks.iter().enumerate() {
            for i in r.clone() {
                out[i] = k;
            }
        }
        out
    }
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Simultaneous block diagonalization. Each input is compressed onto the
/// current blocks and split along its eigenvalue clusters.
pub fn joint_blocks(matrices: &[HermitianMatrix], tol: &Tolerance) -> Result<JointBlockStructure> {
    let n = match matrices.first() {
        Some(m) => m.dim(),
        None => return Err(Error::DimensionTooSmall { n: 0, min: 1 }),
    };
    tol.check_dim(n)?;
    for (i, a) in matrices.iter().enumerate() {
        a.same_dim(&matrices[0])?;
        for b in &matrices[i + 1..] {
            let norm = commutator_norm(a, b)?;
            if norm > tol.effective(a.spectral_norm() * b.spectral_norm()) {
                return Err(Error::NonCommutingInput { norm });
            }
        }
    }

    // (basis columns, labels) per block
    let mut blocks: Vec<(CMatrix, Vec<f64>)> = vec![(CMatrix::identity(n, n), Vec::new())];
    for m in matrices {
        let noise = tol.effective(m.spectral_norm());
        let mut next = Vec::new();
        for (w, label) in &blocks {
            let compressed = HermitianMatrix::hermitize(w.adjoint() * m.matrix() * w);
            let sd = eig_hermitian(&compressed, tol)?;
            if let Some(gap) = sd.ambiguous_gap(noise) {
                return Err(Error::NonSeparableSpectrum { gap });
            }
            let rotated = w * &sd.eigenvectors;
            for (k, r) in sd.clusters.iter().enumerate() {
                let mut l = label.clone();
                l.push(sd.cluster_values()[k]);
                next.push((rotated.columns(r.start, r.len()).into_owned(), l));
            }
        }
        blocks = next;
    }
    blocks.sort_by(|a, b| lex_desc(&a.1, &b.1));

    let mut basis = CMatrix::zeros(n, n);
    let mut ranges = Vec::with_capacity(blocks.len());
    let mut labels = Vec::with_capacity(blocks.len());
    let mut col = 0;
    for (w, l) in blocks {
        for j in 0..w.ncols() {
            basis.set_column(col + j, &w.column(j));
        }
        ranges.push(col..col + w.ncols());
        labels.push(l);
        col += w.ncols();
    }
    let out = JointBlockStructure {
        basis,
        blocks: ranges,
        labels,
    };

    for (idx, m) in matrices.iter().enumerate() {
        let values: Vec<f64> = out
            .block_of_index()
            .iter()
            .map(|&k| out.labels[k][idx])
            .collect();
        let defect = HermitianMatrix::from_eigen(&out.basis, &values).distance(m);
        if defect > 10.0 * tol.effective(m.spectral_norm()) {
            return Err(Error::NumericalFailure(format!(
                "joint block structure off by {defect:e}"
            )));
        }
    }
    Ok(out)
}

/// All projections in `{P, Q}''`: indicator sums over the joint blocks,
/// sorted by trace and then by the diagonal in the joint basis.
pub fn second_commutant_projections(
    p: &Projection,
    q: &Projection,
    tol: &Tolerance,
) -> Result<Vec<HermitianMatrix>> {
    let jb = joint_blocks(&[p.matrix().clone(), q.matrix().clone()], tol)?;
    let k = jb.num_blocks();
    let sizes = jb.block_sizes();
    let block_of = jb.block_of_index();
    let mut masks: Vec<Vec<bool>> = (0..1u64 << k)
        .map(|bits| (0..k).map(|i| bits >> i & 1 == 1).collect())
        .collect();
    let key = |mask: &Vec<bool>| {
        let trace: usize = mask.iter().zip(&sizes).filter(|x| *x.0).map(|x| x.1).sum();
        let diag: Vec<bool> = block_of.iter().map(|&b| mask[b]).collect();
        (trace, diag)
    };
    masks.sort_by_key(key);
    Ok(masks.iter().map(|m| jb.indicator_sum(m)).collect())
}

/// Range and kernel bases of a projection.
fn range_and_kernel(p: &Projection, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    let sd = eig_hermitian(p.matrix(), tol)?;
    let split = sd.eigenvalues.iter().filter(|&&x| x < 0.5).count();
    let n = p.dim();
    let kernel = sd.eigenvectors.columns(0, split).into_owned();
    let range = sd.eigenvectors.columns(split, n - split).into_owned();
    Ok((range, kernel))
}

fn half_columns(w: &CMatrix, all_if_single: bool) -> CMatrix {
    let m = w.ncols();
    let take = if m == 1 {
        usize::from(all_if_single)
    } else {
        m / 2
    };
    w.columns(0, take).into_owned()
}

fn stack(parts: &[CMatrix], n: usize) -> CMatrix {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(n, cols);
    let mut c = 0;
    for p in parts {
        for j in 0..p.ncols() {
            out.set_column(c, &p.column(j));
            c += 1;
        }
    }
    out
}

/// The partner projection that maximizes `|{P, Q}''|`: it splits the range
/// and the kernel of `P` into halves when they have dimension at least two.
pub fn adversarial_partner(p: &Projection, tol: &Tolerance) -> Result<Projection> {
    let (range, kernel) = range_and_kernel(p, tol)?;
    let w = stack(&[half_columns(&range, true), half_columns(&kernel, false)], p.dim());
    Ok(Projection::onto(&w))
}

fn random_subspace_of<R: Rng + ?Sized>(w: &CMatrix, rng: &mut R) -> CMatrix {
    let m = w.ncols();
    if m == 0 {
        return w.clone();
    }
    let r = rng.random_range(0..=m);
    let u = random_unitary_with(m, rng);
    w * u.columns(0, r)
}

/// Decides whether `P` (or `I - P`) has rank one from second-commutant
/// cardinalities over projections commuting with `P`. The adversarial partner
/// is always among the probes.
pub fn bicommutant_rank_one_test(p: &Projection, trials: usize, seed: u64, tol: &Tolerance) -> Result<bool> {
    Ok(max_second_commutant_size(p, trials, seed, tol)? <= 8)
}

/// Largest `|{P, Q}''|` over the adversarial partner and `trials` random `Q`.
pub fn max_second_commutant_size(p: &Projection, trials: usize, seed: u64, tol: &Tolerance) -> Result<usize> {
    if p.is_trivial() {
        return Err(Error::TrivialProjection);
    }
    let n = p.dim();
    let mut best = second_commutant_projections(p, &adversarial_partner(p, tol)?, tol)?.len();
    let (range, kernel) = range_and_kernel(p, tol)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let w = stack(
            &[random_subspace_of(&range, &mut rng), random_subspace_of(&kernel, &mut rng)],
            n,
        );
        let q = Projection::onto(&w);
        best = best.max(second_commutant_projections(p, &q, tol)?.len());
    }
    Ok(best)
}

/// Outcome of [`commutant_equal`].
#[derive(Debug, Clone)]
pub struct CommutantCertificate {
    pub equal: bool,
    /// Injective map from the eigenvalues of `A` to those of `B` when equal.
    pub table: Option<SpectralTable>,
}

/// `A' = B'`: the inputs commute and neither refines the other's joint blocks.
pub fn commutant_equal(a: &HermitianMatrix, b: &HermitianMatrix, tol: &Tolerance) -> Result<CommutantCertificate> {
    a.same_dim(b)?;
    let not_equal = CommutantCertificate {
        equal: false,
        table: None,
    };
    if !commute(a, b, tol)? {
        return Ok(not_equal);
    }
    let joint = joint_blocks(&[a.clone(), b.clone()], tol)?;
    let ja = joint_blocks(std::slice::from_ref(a), tol)?;
    let jbb = joint_blocks(std::slice::from_ref(b), tol)?;
    if joint.num_blocks() != ja.num_blocks() || joint.num_blocks() != jbb.num_blocks() {
        return Ok(not_equal);
    }
    let table = SpectralTable::new(joint.labels.iter().map(|l| (l[0], l[1])).collect());
    Ok(CommutantCertificate {
        equal: true,
        table: Some(table),
    })
}

/// Representative of `{P, I - P}`: the one with trace below `n/2`, otherwise
/// the lexicographically smaller matrix.
pub fn canonical_representative(p: &Projection) -> Projection {
    let n = p.dim();
    let comp = p.complement();
    match (2 * p.rank()).cmp(&n) {
        Ordering::Less => p.clone(),
        Ordering::Greater => comp,
        Ordering::Equal => {
            let key = |m: &HermitianMatrix| -> Vec<f64> {
                m.matrix().transpose().iter().flat_map(|z| [z.re, z.im]).collect()
            };
            let (kp, kc) = (key(p.matrix()), key(comp.matrix()));
            let ord = kp
                .iter()
                .zip(&kc)
                .map(|(x, y)| if (x - y).abs() <= 1e-12 { Ordering::Equal } else { x.total_cmp(y) })
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal);
            if ord == Ordering::Greater {
                comp
            } else {
                p.clone()
            }
        }
    }
}

/// Probabilistic scalar test: `A` commutes with `trials` random hermitians.
pub fn commutes_with_random(a: &HermitianMatrix, trials: usize, seed: u64, tol: &Tolerance) -> Result<bool> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let h = random_hermitian_with(a.dim(), &mut rng);
        if !commute(a, &h, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

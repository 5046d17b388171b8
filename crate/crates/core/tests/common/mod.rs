//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use symlab::matrixcore::{HermitianMatrix, CMatrix};

/// Eigenvalues of a 2x2 hermitian `[[a, z], [conj z, d]]`, closed form.
pub fn eig2(a: f64, d: f64, z: Complex64) -> (f64, f64) {
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + z.norm_sqr()).sqrt();
    (m - r, m + r)
}

fn min_eig2(m: [f64; 4]) -> f64 {
    eig2(m[0], m[1], Complex64::new(m[2], m[3])).0
}

/// `[a11, a22, Re a12, Im a12]`.
pub fn params2(h: &HermitianMatrix) -> [f64; 4] {
    let z = h.get(0, 1);
    [h.get(0, 0).re, h.get(1, 1).re, z.re, z.im]
}

/// Real 2x2 effect `R(theta) diag(x, y) R(theta)^T`.
pub fn rotated_diag(x: f64, y: f64, theta: f64) -> HermitianMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    HermitianMatrix::from_real_rows(&[
        [c * c * x + s * s * y, c * s * (x - y)],
        [c * s * (x - y), s * s * x + c * c * y],
    ])
    .unwrap()
}

/// Eigenvalue in [0, 1], sometimes exactly 0 or 1.
pub fn edge_biased_unit<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if u < 0.15 {
        0.0
    } else if u < 0.3 {
        1.0
    } else {
        rng.random()
    }
}

pub const GRID_STEP: f64 = 0.02;
/// Spectral-norm distance from any hermitian 2x2 to the nearest grid point.
pub const GRID_SLACK: f64 = 0.0245;

/// Best margin `max_G min(lambda_min(G), lambda_min(A-G), lambda_min(B-G),
/// lambda_min(G-A-B+I))` over a grid in the four real parameters of `G`.
pub fn grid_margin(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let pa = params2(a);
    let pb = params2(b);
    let low = [pa[0] + pb[0] - 1.0, pa[1] + pb[1] - 1.0, pa[2] + pb[2], pa[3] + pb[3]];
    let h = GRID_STEP;
    let steps = |hi: f64| (hi / h).ceil().max(0.0) as i64 + 1;
    let mut best = f64::NEG_INFINITY;
    for i in 0..steps(pa[0].min(pb[0])) {
        let g11 = i as f64 * h;
        for j in 0..steps(pa[1].min(pb[1])) {
            let g22 = j as f64 * h;
            let bound = ((g11 + h) * (g22 + h)).sqrt() + h;
            let k = (bound / h).ceil() as i64;
            for r in -k..=k {
                let gr = r as f64 * h;
                for s in -k..=k {
                    let gi = s as f64 * h;
                    if gr * gr + gi * gi > bound * bound {
                        continue;
                    }
                    let g = [g11, g22, gr, gi];
                    let m0 = min_eig2(g);
                    if m0 <= best {
                        continue;
                    }
                    let m1 = min_eig2(std::array::from_fn(|t| pa[t] - g[t]));
                    let m2 = min_eig2(std::array::from_fn(|t| pb[t] - g[t]));
                    let m3 = min_eig2(std::array::from_fn(|t| g[t] - low[t]));
                    best = best.max(m0.min(m1).min(m2).min(m3));
                }
            }
        }
    }
    best
}

/// Reference product `A^{1/2} B A^{1/2}` from a plain Jacobi-free route:
/// square root by Denman-Beavers iteration, independent of the library's
/// eigensolver.
pub fn sqrt_denman_beavers(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().unwrap();
        let zi = z.clone().try_inverse().unwrap();
        let half = Complex64::new(0.5, 0.0);
        let ny = (&y + &zi) * half;
        let nz = (&z + &yi) * half;
        let done = (&ny - &y).norm() < 1e-15 * ny.norm();
        y = ny;
        z = nz;
        if done {
            break;
        }
    }
    y
}

/// `M + slack I` admits a Cholesky factor. Uses no eigensolver.
pub fn psd_cholesky(m: &CMatrix, slack: f64) -> bool {
    let n = m.nrows();
    let mut x = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    for i in 0..n {
        x[(i, i)] += Complex64::new(slack, 0.0);
    }
    // nalgebra's complex Cholesky accepts negative pivots, so factor by hand
    for j in 0..n {
        let mut d = x[(j, j)].re;
        for k in 0..j {
            d -= x[(j, k)].norm_sqr();
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        x[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut v = x[(i, j)];
            for k in 0..j {
                v -= x[(i, k)] * x[(j, k)].conj();
            }
            x[(i, j)] = v / d;
        }
    }
    true
}

/// `A <= B` up to `slack`, by Cholesky.
pub fn le_cholesky(a: &HermitianMatrix, b: &HermitianMatrix, slack: f64) -> bool {
    psd_cholesky(&(b.matrix() - a.matrix()), slack)
}

/// Numerical rank from singular values.
pub fn svd_rank(m: &CMatrix, eps: f64) -> usize {
    m.singular_values().iter().filter(|&&s| s > eps).count()
}

/// `W diag(d) W*` assembled by hand.
pub fn from_eigen(w: &CMatrix, d: &[f64]) -> HermitianMatrix {
    let n = w.nrows();
    let mut m = CMatrix::zeros(n, n);
    for (k, &x) in d.iter().enumerate() {
        let col = w.column(k);
        m += col * col.adjoint() * Complex64::new(x, 0.0);
    }
    HermitianMatrix::from_matrix(m).unwrap()
}

/// Largest entry modulus of `a - b`.
pub fn max_entry(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! The algorithm always runs on a tall matrix; a wide input is transposed first and
//! the roles of the singular vector sets swapped afterwards.

use super::vector::{dot, norm, Vector};
use super::{LinearMap, Subspace};

const MAX_SWEEPS: usize = 80;

/// `A = U diag(sigma) V^T` with `k = min(m, n)` singular triples, sigma descending.
#[derive(Debug, Clone)]
pub struct Svd {
    rows: usize,
    cols: usize,
    sigma: Vec<f64>,
    /// Left singular vectors (length `rows`); zero vectors where sigma is exactly 0.
    left: Vec<Vec<f64>>,
    /// Right singular vectors (length `cols`).
    right: Vec<Vec<f64>>,
}

/// Orthogonalizes the columns of a tall matrix in place.
/// Returns the accumulated right rotation as a list of columns.
fn hestenes(cols: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let n = cols.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                if alpha * beta < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cols, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn rotate(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    let (ci, cj) = (&mut lo[i], &mut hi[0]);
    for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

impl Svd {
    pub fn compute(a: &LinearMap) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let tall = m >= n;
        // columns of the tall operand
        let mut work: Vec<Vec<f64>> = if tall {
            (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect()
        } else {
            (0..m).map(|i| a.row(i).to_vec()).collect()
        };
        let rot = hestenes(&mut work);
        let mut triples: Vec<(f64, Vec<f64>, Vec<f64>)> = work
            .into_iter()
            .zip(rot)
            .map(|(w, r)| {
                let s = norm(&w);
                let u = if s > 0.0 { w.iter().map(|x| x / s).collect() } else { w };
                (s, u, r)
            })
            .collect();
        triples.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut sigma = Vec::with_capacity(triples.len());
        let mut left = Vec::with_capacity(triples.len());
        let mut right = Vec::with_capacity(triples.len());
        for (s, u, r) in triples {
            sigma.push(s);
            if tall {
                left.push(u);
                right.push(r);
            } else {
                left.push(r);
                right.push(u);
            }
        }
        Self {
            rows: m,
            cols: n,
            sigma,
            left,
            right,
        }
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn largest(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Smallest of the `min(m, n)` singular values.
    pub fn smallest(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, eps_rel: f64) -> usize {
        let cutoff = eps_rel * self.largest();
        if self.largest() == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn right_vectors(&self) -> &[Vec<f64>] {
        &self.right
    }

    pub fn left_vectors(&self) -> &[Vec<f64>] {
        &self.left
    }

    /// Orthonormal basis of the numeric kernel: the orthogonal complement of the
    /// right vectors carrying non-negligible singular values.
    pub fn kernel(&self, eps_rel: f64) -> Subspace {
        let r = self.rank(eps_rel);
        if self.cols == self.right.len() {
            let basis = self.right[r..].iter().map(|v| Vector::from_raw(v.clone())).collect();
            return Subspace::from_orthonormal(self.cols, basis);
        }
        let span = self.right[..r].iter().map(|v| Vector::from_raw(v.clone())).collect();
        Subspace::from_orthonormal(self.cols, span).complement()
    }

    /// Orthonormal basis of the numeric range.
    pub fn range(&self, eps_rel: f64) -> Subspace {
        let r = self.rank(eps_rel);
        let basis = self.left[..r].iter().map(|u| Vector::from_raw(u.clone())).collect();
        Subspace::from_orthonormal(self.rows, basis)
    }

    /// `A^+ y` truncated at relative rank tolerance `eps_rel`.
    pub fn pseudo_solve(&self, y: &[f64], eps_rel: f64) -> Vector {
        let r = self.rank(eps_rel);
        let mut x = vec![0.0; self.cols];
        for k in 0..r {
            let coef = dot(&self.left[k], y) / self.sigma[k];
            for (xi, vi) in x.iter_mut().zip(&self.right[k]) {
                *xi += coef * vi;
            }
        }
        Vector::from_raw(x)
    }
}

use serde::Serialize;

use super::vector::{dot, norm, Vector};

/// Linear subspace of `R^ambient_dim` given by an orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
}

/// Default drop threshold for near-dependent inputs, relative to the input norm.
pub const DEFAULT_DEPENDENCE_TOL: f64 = 1e-12;

impl Subspace {
    /// Trusted constructor; callers guarantee orthonormality.
    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: Vec<Vector>) -> Self {
        Self { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self::from_orthonormal(ambient_dim, Vec::new())
    }

    pub fn whole(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| Vector::basis(ambient_dim, i)).collect();
        Self::from_orthonormal(ambient_dim, basis)
    }

    /// Gram–Schmidt (with one re-orthogonalization pass) dropping inputs whose
    /// residual falls below `1e-12` times their norm.
    pub fn orthonormalize(ambient_dim: usize, vectors: &[Vector]) -> Self {
        Self::orthonormalize_with_tol(ambient_dim, vectors, DEFAULT_DEPENDENCE_TOL)
    }

    pub fn orthonormalize_with_tol(ambient_dim: usize, vectors: &[Vector], tol: f64) -> Self {
        let mut basis: Vec<Vector> = Vec::new();
        for v in vectors {
            assert_eq!(v.dim(), ambient_dim, "orthonormalize: dimension mismatch");
            let scale = v.norm();
            if scale == 0.0 {
                continue;
            }
            let mut r = v.as_slice().to_vec();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &r);
                    for (ri, bi) in r.iter_mut().zip(b.iter()) {
                        *ri -= c * bi;
                    }
                }
            }
            let rn = norm(&r);
            if rn < tol * scale {
                continue;
            }
            basis.push(Vector::from_raw(r.into_iter().map(|x| x / rn).collect()));
        }
        Self::from_orthonormal(ambient_dim, basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    /// Coordinates of `v` in the basis (`B^T v`).
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// `B c`.
    pub fn lift(&self, coords: &[f64]) -> Vector {
        let mut out = vec![0.0; self.ambient_dim];
        for (b, c) in self.basis.iter().zip(coords) {
            for (o, bi) in out.iter_mut().zip(b.iter()) {
                *o += c * bi;
            }
        }
        Vector::from_raw(out)
    }

    pub fn project_onto(&self, v: &[f64]) -> Vector {
        self.lift(&self.coordinates(v))
    }

    pub fn project_complement(&self, v: &[f64]) -> Vector {
        let p = self.project_onto(v);
        Vector::from_raw(v.iter().zip(p.iter()).map(|(a, b)| a - b).collect())
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.project_complement(v).norm()
    }

    /// Orthonormal basis of the orthogonal complement, built by pivoted Gram–Schmidt
    /// over the standard basis.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim;
        let mut all = self.basis.clone();
        let mut extra = Vec::new();
        while all.len() < n {
            let current = Subspace::from_orthonormal(n, all.clone());
            let (best, resid) = (0..n)
                .map(|i| {
                    let r = current.project_complement(&Vector::basis(n, i));
                    (r.clone(), r.norm())
                })
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("ambient dimension >= 1");
            let mut r = best.scaled(1.0 / resid);
            // second pass for orthogonality
            r = current.project_complement(&r);
            let r = r.normalized().expect("pivot residual is bounded below");
            all.push(r.clone());
            extra.push(r);
        }
        Subspace::from_orthonormal(n, extra)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }
}

//! Dense real linear algebra: vectors, matrices, a Jacobi SVD and subspaces.

mod matrix;
mod subspace;
mod svd;
mod vector;

pub use matrix::LinearMap;
pub use subspace::{Subspace, DEFAULT_DEPENDENCE_TOL};
pub use svd::Svd;
pub use vector::{angle, distance, dot, norm, Vector};

/// Orthonormal basis of the span of `vectors`, computed from the SVD of the matrix
/// having them as columns. More robust than Gram–Schmidt for noisy generators.
pub fn span(ambient_dim: usize, vectors: &[Vector], eps_rel: f64) -> Subspace {
    if vectors.is_empty() {
        return Subspace::zero(ambient_dim);
    }
    let m = LinearMap::from_columns(ambient_dim, vectors).expect("callers pass finite vectors");
    m.svd().range(eps_rel)
}

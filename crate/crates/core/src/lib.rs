//! Stability certificates for the closedness of linear images of closed convex sets.
//!
//! Given a closed convex set `X ⊂ R^n` and a linear map `T: R^n -> R^m`, the
//! crate decides whether `T(X)` is closed *robustly*: either the asymptotic cone of
//! `X` meets `ker T` only at the origin (kernel-trivial certificate, with a
//! perturbation radius), or `ker T` meets the relative interior of the asymptotic
//! cone while `T` has full rank on its span (relative-interior certificate). Maps
//! that carry neither certificate can be repaired by an arbitrarily small
//! perturbation.
//!
//! Modules:
//! - [`linalg`]: dense vectors, matrices, SVD, subspaces.
//! - [`convex`]: supported convex sets, asymptotic cones, double description.
//! - [`lp`]: a small dense simplex solver.
//! - [`certifier`]: classification, radii, preimages, repair.
//! - [`porosity`]: Monte-Carlo porosity estimation and bound checks.
//! - [`genericity`]: random-map surveys and the non-closed image demo.

pub mod certifier;
pub mod convex;
pub mod error;
pub mod genericity;
pub mod linalg;
pub mod lp;
pub mod porosity;
pub mod rng;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{LinearMap, Subspace, Vector};
pub use tolerance::Tolerances;

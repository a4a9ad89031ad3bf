//! Monte-Carlo porosity estimation and the preimage porosity bound.
//!
//! The porosity of `X` at `x` is `liminf_{R -> 0} γ(x, R, X) / R`, where
//! `γ(x, R, X)` is the radius of the largest ball inside `B(x, R)` that misses `X`.

mod bound;
mod estimate;
mod oracle;

pub use bound::{
    preimage_porosity_bound, verify_preimage_porosity, verify_preimage_porosity_with,
    PreimageBoundInputs, PreimageVerification, VERIFY_SLACK,
};
pub use estimate::{default_radii, gamma_estimate, porosity_estimate, PorosityEstimate, MIN_BUDGET, TAIL};
pub use oracle::{AffineSet, OracleKind, SetOracle};

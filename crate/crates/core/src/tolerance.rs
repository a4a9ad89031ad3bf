//! Centralized numeric tolerances.

use serde::{Deserialize, Serialize};

/// Every tolerance used by the crate, in one record.
///
/// All values are relative unless the field says otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Residual allowed in `least_norm_solution`, relative to `max(1, |y|)`.
    pub residual: f64,
    /// Orthogonality and unit-norm slack for subspace bases.
    pub orthogonality: f64,
    /// Feasibility / optimality tolerance of the simplex solver.
    pub lp: f64,
    /// Absolute slack for membership tests.
    pub membership: f64,
    /// Zero-snapping threshold used by double description.
    pub snap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-9,
            residual: 1e-9,
            orthogonality: 1e-12,
            lp: 1e-9,
            membership: 1e-9,
            snap: 1e-10,
        }
    }
}

use serde::Serialize;

use super::estimate::{default_radii, porosity_estimate};
use super::oracle::SetOracle;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{LinearMap, Vector};
use crate::rng::derive_seed;
use crate::tolerance::Tolerances;

/// Slack allowed between measured porosity and the bound.
pub const VERIFY_SLACK: f64 = 0.05;

/// Constants of the preimage porosity bound for a surjective `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageBoundInputs {
    #[serde(skip)]
    pub f: LinearMap,
    /// Smallest nonzero singular value of `f`.
    pub nu_f: f64,
    pub c: f64,
    pub big_m: f64,
    pub p_y: f64,
}

impl PreimageBoundInputs {
    pub fn new(f: &LinearMap, p_y: f64) -> Result<Self> {
        Self::with_tol(f, p_y, Tolerances::default().rank)
    }

    pub fn with_tol(f: &LinearMap, p_y: f64, rank_tol: f64) -> Result<Self> {
        let svd = f.svd();
        let rank = svd.rank(rank_tol);
        if rank < f.rows() {
            return Err(Error::NotSurjective { rank, rows: f.rows() });
        }
        if !(p_y >= 0.0) {
            return Err(Error::InvalidInput("target porosity must be nonnegative".into()));
        }
        let nu_f = svd.singular_values()[f.rows() - 1];
        let c = nu_f.min(1.0);
        let big_m = svd.largest().max(1.0 / c);
        Ok(Self {
            f: f.clone(),
            nu_f,
            c,
            big_m,
            p_y,
        })
    }
}

/// `c p_y / (2 M)`.
pub fn preimage_porosity_bound(inputs: &PreimageBoundInputs) -> Result<f64> {
    let fresh = PreimageBoundInputs::new(&inputs.f, inputs.p_y)?;
    Ok(fresh.c * fresh.p_y / (2.0 * fresh.big_m))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageVerification {
    pub x: Vector,
    /// Estimated porosity of the target at `y`.
    pub p_y: f64,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn verify_preimage_porosity(
    f: &LinearMap,
    target: &SetOracle,
    y: &[f64],
    budget: usize,
    seed: u64,
) -> Result<PreimageVerification> {
    verify_preimage_porosity_with(f, target, y, &default_radii(1.0), budget, seed)
}

pub fn verify_preimage_porosity_with(
    f: &LinearMap,
    target: &SetOracle,
    y: &[f64],
    radii: &[f64],
    budget: usize,
    seed: u64,
) -> Result<PreimageVerification> {
    check_dim(f.rows(), y.len())?;
    let tol = Tolerances::default();
    let target_est = porosity_estimate(y, target, radii, budget, derive_seed(seed, 1))?;
    let inputs = PreimageBoundInputs::new(f, target_est.p_hat)?;
    let bound = preimage_porosity_bound(&inputs)?;
    let x = f.least_norm_solution(y, tol.rank, 1e-8)?;
    let pulled = target.pullback(f, tol.rank)?;
    let measured = porosity_estimate(&x, &pulled, radii, budget, derive_seed(seed, 2))?.p_hat;
    Ok(PreimageVerification {
        x,
        p_y: target_est.p_hat,
        measured,
        bound,
        pass: measured >= bound - VERIFY_SLACK,
    })
}

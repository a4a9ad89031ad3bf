use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::oracle::{OracleKind, SetOracle};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{distance, Vector};
use crate::rng::{derive_seed, stream, uniform_in_ball};

/// Candidate centers per random stream.
const CHUNK: usize = 4096;
/// Probes per candidate center for membership oracles.
const PROBES: usize = 256;
pub const MIN_BUDGET: usize = 100;
/// Number of smallest radii entering `p_hat`.
pub const TAIL: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PorosityEstimate {
    pub center: Vector,
    pub radii: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub p_hat: f64,
    pub budget: usize,
}

/// `R0 * 2^-i` for `i = 0..=10`.
pub fn default_radii(r0: f64) -> Vec<f64> {
    (0..=10).map(|i| r0 * 0.5f64.powi(i)).collect()
}

/// Lower estimate of the largest ball inside `B(x, R)` missing the set.
/// Budgets below [`MIN_BUDGET`] are raised to it.
pub fn gamma_estimate(x: &[f64], r: f64, oracle: &SetOracle, budget: usize, seed: u64) -> Result<f64> {
    check_dim(oracle.dim(), x.len())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let budget = budget.max(MIN_BUDGET);
    let best = match oracle.kind() {
        OracleKind::Distance(dist) => {
            let chunks = budget.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let len = CHUNK.min(budget - c * CHUNK);
                    let mut rng = stream(seed, c as u64);
                    let mut best: f64 = 0.0;
                    for _ in 0..len {
                        let z = uniform_in_ball(&mut rng, x, r);
                        let room = r - distance(&z, x);
                        best = best.max(dist(&z).min(room));
                    }
                    best
                })
                .reduce(|| 0.0, f64::max)
        }
        OracleKind::Membership(member) => {
            let centers = (budget / PROBES).max(1);
            (0..centers)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream(seed, c as u64);
                    let z = uniform_in_ball(&mut rng, x, r);
                    if member(&z) {
                        return 0.0;
                    }
                    let room = r - distance(&z, x);
                    // nearest member probe bounds the empty ball around z
                    let mut radius = room;
                    for _ in 0..PROBES {
                        let probe_r = room * rng.random::<f64>().powf(1.0 / x.len() as f64);
                        let dir = uniform_in_ball(&mut rng, &vec![0.0; x.len()], 1.0);
                        let dn = crate::linalg::norm(&dir).max(1e-300);
                        let p: Vec<f64> = z.iter().zip(&dir).map(|(zi, d)| zi + probe_r * d / dn).collect();
                        if probe_r < radius && member(&p) {
                            radius = probe_r;
                        }
                    }
                    radius
                })
                .reduce(|| 0.0, f64::max)
        }
    };
    Ok(best.clamp(0.0, r))
}

pub fn porosity_estimate(
    x: &[f64],
    oracle: &SetOracle,
    radii: &[f64],
    budget: usize,
    seed: u64,
) -> Result<PorosityEstimate> {
    if radii.len() < TAIL + 1 {
        return Err(Error::InvalidInput(format!("need at least {} radii", TAIL + 1)));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive and strictly decreasing".into()));
    }
    let gamma_hat = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| gamma_estimate(x, r, oracle, budget, derive_seed(seed, i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let n = radii.len();
    let p_hat = (n - TAIL..n)
        .map(|i| gamma_hat[i] / radii[i])
        .fold(f64::INFINITY, f64::min);
    Ok(PorosityEstimate {
        center: Vector::new(x.to_vec())?,
        radii: radii.to_vec(),
        gamma_hat,
        p_hat,
        budget: budget.max(MIN_BUDGET),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_space_is_not_porous() {
        let o = SetOracle::whole_space(2);
        assert_eq!(gamma_estimate(&[0.3, 0.1], 1.0, &o, 1000, 0).unwrap(), 0.0);
        let est = porosity_estimate(&[0.0, 0.0], &o, &default_radii(1.0), 500, 1).unwrap();
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn point_in_line() {
        let o = SetOracle::point(Vector::new(vec![0.0]).unwrap());
        let g = gamma_estimate(&[0.0], 1.0, &o, 10_000, 2).unwrap();
        assert!(g <= 0.5 + 1e-12 && g > 0.49, "{g}");
    }

    #[test]
    fn gamma_never_exceeds_radius() {
        let o = SetOracle::point(Vector::new(vec![10.0, 10.0]).unwrap());
        let g = gamma_estimate(&[0.0, 0.0], 0.25, &o, 2000, 3).unwrap();
        assert!(g <= 0.25);
        assert!(g > 0.24);
    }

    #[test]
    fn schedule_validation() {
        let o = SetOracle::whole_space(1);
        assert!(porosity_estimate(&[0.0], &o, &[1.0, 0.5, 0.25], 100, 0).is_err());
        assert!(porosity_estimate(&[0.0], &o, &[1.0, 0.5, 0.5, 0.25], 100, 0).is_err());
        assert_eq!(default_radii(2.0).len(), 11);
    }

    #[test]
    fn circle_membership_estimate_positive() {
        let o = SetOracle::unit_circle(1e-4);
        let est = porosity_estimate(&[1.0, 0.0], &o, &default_radii(0.1), 20_000, 5).unwrap();
        assert!(est.p_hat > 0.0, "{est:?}");
        assert!(est.gamma_hat.iter().zip(&est.radii).all(|(g, r)| g <= r));
    }
}

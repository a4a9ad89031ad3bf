use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CertificateClass, PreparedSet};
use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::rng::{gaussian_vec, stream};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodReport {
    pub class: CertificateClass,
    pub radius: f64,
    pub samples: usize,
    pub agreed: usize,
    /// `agreed / samples`, or 1 when no samples were drawn.
    pub fraction: f64,
    pub vacuous: bool,
}

/// A perturbation `E` with `|E| < r` in operator norm: Gaussian direction scaled to
/// operator norm `r U^(1/mn)`.
pub(crate) fn perturbation(t: &LinearMap, r: f64, seed: u64, index: u64) -> LinearMap {
    let mut rng = stream(seed, index);
    let (m, n) = (t.rows(), t.cols());
    loop {
        let e = LinearMap::from_raw(m, n, gaussian_vec(&mut rng, m * n));
        let en = e.operator_norm();
        if en > 0.0 {
            let u: f64 = rng.random();
            let scale = r * u.powf(1.0 / (m * n) as f64) / en;
            return e.scaled(scale);
        }
    }
}

pub(crate) fn check(
    set: &PreparedSet,
    t: &LinearMap,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<NeighborhoodReport> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let class = set.classify(t)?.class();
    if !class.is_certified() {
        return Err(Error::NotApplicable("map is not certified".into()));
    }
    let agreed = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = t.add(&perturbation(t, r, seed, i)).expect("same shape");
            matches!(set.verdict(&s), Ok(c) if c == class)
        })
        .filter(|&ok| ok)
        .count();
    Ok(NeighborhoodReport {
        class,
        radius: r,
        samples,
        agreed,
        fraction: if samples == 0 { 1.0 } else { agreed as f64 / samples as f64 },
        vacuous: samples == 0,
    })
}

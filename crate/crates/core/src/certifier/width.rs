use crate::convex::{AnalyticCone, ConeRep, RayDirection};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::tolerance::Tolerances;

/// Upper cap keeping `δ` strictly below 1.
pub const DELTA_CAP: f64 = 0.99;

/// A `δ ∈ (0, 1)` such that every unit vector of the hull within sine-angle `δ` of
/// `u` lies in `K`.
pub fn cone_width_delta(k: &ConeRep, u: &RayDirection) -> Result<f64> {
    cone_width_delta_with(k, u, &Tolerances::default())
}

pub(crate) fn cone_width_delta_with(k: &ConeRep, u: &RayDirection, tol: &Tolerances) -> Result<f64> {
    crate::error::check_dim(k.ambient_dim(), u.len())?;
    if !k.ri_contains(u, tol.membership) {
        return Err(Error::RayNotInterior);
    }
    let delta = match k.analytic_tag() {
        Some(AnalyticCone::SecondOrder) => {
            let n = u.len();
            let ang = norm(&u[..n - 1]).atan2(u[n - 1]);
            (std::f64::consts::FRAC_PI_4 - ang).sin()
        }
        Some(AnalyticCone::RotatedSecondOrder) => rsoc_boundary_distance(u),
        None => {
            let owned;
            let facets = match k.facets() {
                Some(f) => f,
                None => {
                    owned = k.clone().with_facets()?;
                    owned.facets().expect("facets populated")
                }
            };
            if facets.is_empty() {
                DELTA_CAP
            } else {
                facets.iter().map(|a| dot(a, u)).fold(f64::INFINITY, f64::min)
            }
        }
    };
    if delta <= 0.0 {
        return Err(Error::RayNotInterior);
    }
    Ok(delta.min(DELTA_CAP))
}

/// Distance from unit `u` to the boundary of the rotated cone, i.e. the minimum of
/// `<a, u>` over unit `a` in the dual cone `{ 4 x z >= |y|^2 }`. Extreme dual rays
/// are `(cos ψ, -2 sqrt(cos ψ sin ψ) ŷ, sin ψ)` with `ŷ` aligned to `u_y`.
pub(crate) fn rsoc_boundary_distance(u: &[f64]) -> f64 {
    let n = u.len();
    let (ux, uz) = (u[0], u[n - 1]);
    let uy = norm(&u[1..n - 1]);
    let f = |psi: f64| {
        let (s, c) = psi.sin_cos();
        let (s, c) = (s.max(0.0), c.max(0.0));
        (c * ux + s * uz - 2.0 * (c * s).sqrt() * uy) / (1.0 + 2.0 * (2.0 * psi).sin()).sqrt()
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    const GRID: usize = 512;
    let h = half_pi / GRID as f64;
    let (mut best_i, mut best) = (0, f(0.0));
    for i in 1..=GRID {
        let v = f(i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // golden-section refinement around the best grid cell
    let (mut a, mut b) = (
        (best_i as f64 - 1.0).max(0.0) * h,
        (best_i as f64 + 1.0).min(GRID as f64) * h,
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    best.min(f1).min(f2)
}

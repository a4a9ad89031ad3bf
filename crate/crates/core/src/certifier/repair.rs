use serde::Serialize;

use super::{Certificate, PreparedSet, UncertifiedReason};
use crate::error::{Error, Result};
use crate::linalg::{angle, dot, LinearMap, Vector};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageWitness {
    /// Least-norm solution of `T x = y` inside the hull of the asymptotic cone.
    pub x_min: Vector,
    pub t: f64,
    /// `x_min + t u`, a point of the asymptotic cone with `T w = y`.
    pub w: Vector,
    pub delta: f64,
    pub margin: f64,
}

pub(crate) fn preimage(
    set: &PreparedSet,
    t: &LinearMap,
    cert: &Certificate,
    y: &[f64],
    margin: f64,
) -> Result<PreimageWitness> {
    let Certificate::RelIntKernel { ray, delta, .. } = cert else {
        return Err(Error::NotCertifiedB);
    };
    crate::error::check_dim(t.rows(), y.len())?;
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidInput("margin must be positive".into()));
    }
    let hull = set.cone().hull();
    let tq = t.restrict_to(hull)?.ok_or(Error::NotCertifiedB)?;
    let tol = set.tolerances();
    let coords = tq.least_norm_solution(y, tol.rank, tol.residual.max(1e-9))?;
    let x_min = hull.lift(&coords);
    let xn = x_min.norm();
    let delta = *delta;
    let t_scale = if xn == 0.0 {
        margin
    } else {
        xn * ((1.0 - delta * delta) / (delta * delta)).sqrt() * (1.0 + margin)
    };
    let w = x_min.axpy(t_scale, ray);
    let ynorm = crate::linalg::norm(y);
    let residual = t.apply(&w).sub(y).norm();
    if residual > 1e-8 * ynorm.max(1.0) {
        return Err(Error::Numerical(format!("preimage residual {residual:.3e}")));
    }
    if !set.cone().contains(&w, tol.membership * w.norm().max(1.0)) {
        return Err(Error::Numerical("preimage left the asymptotic cone".into()));
    }
    Ok(PreimageWitness {
        x_min,
        t: t_scale,
        w,
        delta,
        margin,
    })
}

/// A nearby certified map and the data of its construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Repair {
    pub map: LinearMap,
    /// Boundary direction of `K ∩ ker T` the repair starts from.
    pub v_star: Vector,
    /// Relative-interior direction placed into the new kernel.
    pub v_k: Vector,
    pub angle: f64,
    /// `|T' - T|` in operator norm.
    pub perturbation: f64,
    /// `|T| tan(angle)`.
    pub bound: f64,
}

pub(crate) fn repair(set: &PreparedSet, t: &LinearMap, eps: f64) -> Result<Repair> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput("eps must lie in (0, 1)".into()));
    }
    let v_star = match set.classify(t)? {
        Certificate::Uncertified {
            reason: UncertifiedReason::KernelTouchesBoundary,
            witness: Some(w),
        } => w,
        Certificate::Uncertified {
            reason: UncertifiedReason::RankDeficientOnY,
            ..
        } => {
            return Err(Error::NotApplicable(
                "map is rank deficient on the hull of the asymptotic cone".into(),
            ))
        }
        Certificate::Uncertified { .. } => {
            return Err(Error::NotApplicable("no boundary kernel direction available".into()))
        }
        _ => return Err(Error::NotApplicable("map is already certified".into())),
    };
    let interior = set.cone().ri_point()?;
    let v_k = v_star
        .scaled(1.0 - eps)
        .axpy(eps, &interior)
        .normalized()
        .ok_or_else(|| Error::Numerical("degenerate repair direction".into()))?;
    let c = dot(&v_star, &v_k);
    if c <= 0.0 {
        return Err(Error::Numerical("repair direction not acute".into()));
    }
    // M x = π x - (<v*, π x> / <v*, v^k>) v^k with π the projection onto (v^k)^⊥;
    // M is the identity on (v*)^⊥ and kills v^k
    let n = t.cols();
    let columns: Vec<Vector> = (0..n)
        .map(|j| {
            let e = Vector::basis(n, j);
            let pe = e.axpy(-v_k[j], &v_k);
            let coef = dot(&v_star, &pe) / c;
            pe.axpy(-coef, &v_k)
        })
        .collect();
    let m = LinearMap::from_columns(n, &columns)?;
    let map = t.compose(&m)?;
    let theta = angle(&v_k, &v_star);
    let perturbation = map.sub(t)?.operator_norm();
    let bound = t.operator_norm() * theta.tan();
    if map.apply(&v_k).norm() > 1e-9 * t.operator_norm().max(1.0) {
        return Err(Error::Numerical("repaired map does not vanish on v^k".into()));
    }
    if perturbation > bound + 1e-9 {
        return Err(Error::Numerical(format!(
            "repair perturbation {perturbation:.3e} exceeds bound {bound:.3e}"
        )));
    }
    Ok(Repair {
        map,
        v_star,
        v_k,
        angle: theta,
        perturbation,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::{ConeRep, ConvexSetDescription};

    fn orthant() -> PreparedSet {
        PreparedSet::new(&ConvexSetDescription::cone(ConeRep::orthant(2))).unwrap()
    }

    #[test]
    fn preimage_hand_example() {
        let set = orthant();
        let t = LinearMap::from_rows(&[[1.0, -1.0]]).unwrap();
        let p = set.preimage_witness(&t, &[5.0], 0.01).unwrap();
        assert!((p.x_min[0] - 2.5).abs() < 1e-12 && (p.x_min[1] + 2.5).abs() < 1e-12);
        let expect_t = 12.5f64.sqrt() * 1.01;
        assert!((p.t - expect_t).abs() < 1e-12);
        assert!((p.t - 3.571).abs() < 1e-3);
        assert!((p.w[0] - 5.025).abs() < 1e-12 && (p.w[1] - 0.025).abs() < 1e-12);
        let z = set.preimage_witness(&t, &[0.0], 0.01).unwrap();
        assert_eq!(z.x_min.norm(), 0.0);
        assert!((z.w.norm() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn preimage_requires_class_b() {
        let set = orthant();
        let t = LinearMap::identity(2);
        assert!(matches!(set.preimage_witness(&t, &[1.0, 1.0], 0.1), Err(Error::NotCertifiedB)));
    }

    #[test]
    fn repair_axis_kernel() {
        let set = orthant();
        let t = LinearMap::from_rows(&[[1.0, 0.0]]).unwrap();
        let r = set.repair(&t, 0.1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let raw = [0.1 * h, 0.9 + 0.1 * h];
        let nrm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        assert!((r.v_k[0] - raw[0] / nrm).abs() < 1e-12);
        assert!((r.v_k[1] - raw[1] / nrm).abs() < 1e-12);
        assert!(r.map.apply(&r.v_k).norm() < 1e-12);
        assert!(r.perturbation <= r.bound + 1e-12);
        assert!(set.classify(&r.map).unwrap().is_certified());
        assert!(matches!(set.repair(&LinearMap::identity(2), 0.1), Err(Error::NotApplicable(_))));
    }
}

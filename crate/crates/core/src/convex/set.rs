use super::cone::{AnalyticCone, ConeRep, DD_MAX_AMBIENT_DIM, DD_MAX_GENERATORS};
use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;
use crate::lp::{lp_solve_with_tol, LpOutcome, LpProblem};
use crate::tolerance::Tolerances;

/// The supported closed convex sets.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSetDescription {
    /// `conv(points) + cone(rays)` in `R^dim`.
    Polyhedron {
        dim: usize,
        points: Vec<Vector>,
        rays: Vec<Vector>,
    },
    PolyhedralCone { rep: ConeRep },
    /// `{ (w, z) : z >= |w| }` in `R^dim`.
    SecondOrderCone { dim: usize },
    /// `{ (x, y, z) : x, z >= 0, x z >= |y|^2 }` in `R^dim`.
    RotatedSecondOrderCone { dim: usize },
    Translate {
        base: Box<ConvexSetDescription>,
        offset: Vector,
    },
}

impl ConvexSetDescription {
    pub fn polyhedron(points: Vec<Vector>, rays: Vec<Vector>) -> Result<Self> {
        let dim = points
            .first()
            .or(rays.first())
            .map(Vector::dim)
            .ok_or(Error::EmptySet)?;
        Self::polyhedron_in(dim, points, rays)
    }

    /// Like [`ConvexSetDescription::polyhedron`] but with an explicit ambient dimension,
    /// so an empty point list can be represented (and later reported as empty).
    pub fn polyhedron_in(dim: usize, points: Vec<Vector>, rays: Vec<Vector>) -> Result<Self> {
        let set = Self::Polyhedron { dim, points, rays };
        set.validate()?;
        Ok(set)
    }

    pub fn cone(rep: ConeRep) -> Self {
        Self::PolyhedralCone { rep }
    }

    pub fn soc(dim: usize) -> Result<Self> {
        let set = Self::SecondOrderCone { dim };
        set.validate()?;
        Ok(set)
    }

    pub fn rsoc(dim: usize) -> Result<Self> {
        let set = Self::RotatedSecondOrderCone { dim };
        set.validate()?;
        Ok(set)
    }

    /// `base + offset`, flattening nested translates.
    pub fn translate(base: ConvexSetDescription, offset: Vector) -> Result<Self> {
        check_dim(base.ambient_dim(), offset.dim())?;
        Ok(match base {
            Self::Translate { base, offset: inner } => Self::Translate {
                base,
                offset: inner.add(&offset),
            },
            other => Self::Translate {
                base: Box::new(other),
                offset,
            },
        })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Polyhedron { dim, .. } => *dim,
            Self::PolyhedralCone { rep } => rep.ambient_dim(),
            Self::SecondOrderCone { dim } | Self::RotatedSecondOrderCone { dim } => *dim,
            Self::Translate { offset, .. } => offset.dim(),
        }
    }

    /// Checks shared dimensions, nonzero rays, analytic minimum dimensions and
    /// translate depth.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Polyhedron { dim, points, rays } => {
                if *dim == 0 {
                    return Err(Error::InvalidInput("ambient dimension must be >= 1".into()));
                }
                for v in points.iter().chain(rays) {
                    check_dim(*dim, v.dim())?;
                }
                if rays.iter().any(|r| r.norm() == 0.0) {
                    return Err(Error::InvalidInput("rays must be nonzero".into()));
                }
                Ok(())
            }
            Self::PolyhedralCone { .. } => Ok(()),
            Self::SecondOrderCone { dim } => {
                ConeRep::analytic(AnalyticCone::SecondOrder, *dim).map(|_| ())
            }
            Self::RotatedSecondOrderCone { dim } => {
                ConeRep::analytic(AnalyticCone::RotatedSecondOrder, *dim).map(|_| ())
            }
            Self::Translate { base, offset } => {
                if matches!(**base, Self::Translate { .. }) {
                    return Err(Error::InvalidInput("nested translate".into()));
                }
                base.validate()?;
                check_dim(base.ambient_dim(), offset.dim())
            }
        }
    }

    /// Some point of the set.
    pub fn sample_point(&self) -> Result<Vector> {
        match self {
            Self::Polyhedron { points, .. } => points.first().cloned().ok_or(Error::EmptySet),
            Self::Translate { base, offset } => Ok(base.sample_point()?.add(offset)),
            other => Ok(Vector::zeros(other.ambient_dim())),
        }
    }

    /// Membership within tolerance `tol`.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        match self {
            Self::Polyhedron { points, rays, .. } => polyhedron_contains(points, rays, v, tol),
            Self::PolyhedralCone { rep } => rep.contains(v, tol),
            Self::SecondOrderCone { .. } => AnalyticCone::SecondOrder.contains(v, tol),
            Self::RotatedSecondOrderCone { .. } => AnalyticCone::RotatedSecondOrder.contains(v, tol),
            Self::Translate { base, offset } => {
                let shifted: Vec<f64> = v.iter().zip(offset.iter()).map(|(a, b)| a - b).collect();
                base.contains(&shifted, tol)
            }
        }
    }
}

/// `min |P μ + R λ - v|_1` subject to `μ, λ >= 0`, `Σ μ = 1`.
fn polyhedron_contains(points: &[Vector], rays: &[Vector], v: &[f64], tol: f64) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = v.len();
    let (k, r) = (points.len(), rays.len());
    let nv = k + r + 2 * n;
    let mut objective = vec![0.0; nv];
    for o in objective.iter_mut().skip(k + r) {
        *o = -1.0;
    }
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for (j, p) in points.iter().enumerate() {
            row[j] = p[i];
        }
        for (j, d) in rays.iter().enumerate() {
            row[k + j] = d[i];
        }
        row[k + r + i] = 1.0;
        row[k + r + n + i] = -1.0;
        rows.push(row);
    }
    let mut sum = vec![0.0; nv];
    sum[..k].iter_mut().for_each(|x| *x = 1.0);
    rows.push(sum);
    let mut rhs = v.to_vec();
    rhs.push(1.0);
    let Ok(p) = LpProblem::nonnegative(objective, rows, rhs) else {
        return false;
    };
    matches!(lp_solve_with_tol(&p, Tolerances::default().lp),
        Ok(LpOutcome::Optimal { value, .. }) if -value <= tol)
}

fn populate_facets(rep: ConeRep) -> Result<ConeRep> {
    if rep.facets().is_some()
        || !rep.is_polyhedral()
        || rep.ambient_dim() > DD_MAX_AMBIENT_DIM
        || rep.generators().len() > DD_MAX_GENERATORS
    {
        return Ok(rep);
    }
    rep.with_facets()
}

/// The asymptotic (recession) cone `C∞X`, with hull populated and facets populated
/// whenever the instance is within double-description scale.
pub fn asymptotic_cone(x: &ConvexSetDescription) -> Result<ConeRep> {
    x.validate()?;
    match x {
        ConvexSetDescription::Polyhedron { dim, points, rays } => {
            if points.is_empty() {
                return Err(Error::EmptySet);
            }
            populate_facets(ConeRep::finitely_generated(*dim, rays.clone())?)
        }
        ConvexSetDescription::PolyhedralCone { rep } => populate_facets(rep.clone()),
        ConvexSetDescription::SecondOrderCone { dim } => {
            ConeRep::analytic(AnalyticCone::SecondOrder, *dim)
        }
        ConvexSetDescription::RotatedSecondOrderCone { dim } => {
            ConeRep::analytic(AnalyticCone::RotatedSecondOrder, *dim)
        }
        ConvexSetDescription::Translate { base, .. } => asymptotic_cone(base),
    }
}

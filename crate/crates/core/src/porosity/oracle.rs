use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{LinearMap, Subspace, Vector};
use crate::rng::{stream, uniform_in_ball};

type DistanceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type MembershipFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum OracleKind {
    /// Distance to the set; expected 1-Lipschitz.
    Distance(DistanceFn),
    Membership(MembershipFn),
}

/// `point + span(directions)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    pub point: Vector,
    pub directions: Subspace,
}

impl AffineSet {
    pub fn distance(&self, x: &[f64]) -> f64 {
        let d = Vector::from_raw(x.to_vec()).sub(&self.point);
        self.directions.residual(&d)
    }
}

/// A set in `R^dim` known through a distance or membership oracle.
#[derive(Clone)]
pub struct SetOracle {
    dim: usize,
    kind: OracleKind,
    affine: Option<AffineSet>,
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            OracleKind::Distance(_) => "distance",
            OracleKind::Membership(_) => "membership",
        };
        f.debug_struct("SetOracle")
            .field("dim", &self.dim)
            .field("kind", &kind)
            .field("affine", &self.affine)
            .finish()
    }
}

impl SetOracle {
    pub fn distance(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            kind: OracleKind::Distance(Arc::new(f)),
            affine: None,
        }
    }

    pub fn membership(dim: usize, f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self {
            dim,
            kind: OracleKind::Membership(Arc::new(f)),
            affine: None,
        }
    }

    /// The affine subspace `point + directions`, with exact distance.
    pub fn affine(point: Vector, directions: Subspace) -> Result<Self> {
        check_dim(point.dim(), directions.ambient_dim())?;
        let set = AffineSet { point, directions };
        let inner = set.clone();
        Ok(Self {
            dim: set.point.dim(),
            kind: OracleKind::Distance(Arc::new(move |x| inner.distance(x))),
            affine: Some(set),
        })
    }

    pub fn point(p: Vector) -> Self {
        let n = p.dim();
        Self::affine(p, Subspace::zero(n)).expect("matching dimensions")
    }

    /// `{ x : <normal, x> = offset }`.
    pub fn hyperplane(normal: &Vector, offset: f64) -> Result<Self> {
        let n = normal.dim();
        let unit = normal
            .normalized()
            .ok_or_else(|| Error::InvalidInput("hyperplane normal must be nonzero".into()))?;
        let point = unit.scaled(offset / normal.norm());
        let directions = Subspace::orthonormalize(n, &[unit]).complement();
        Self::affine(point, directions)
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::affine(Vector::zeros(dim), Subspace::whole(dim)).expect("matching dimensions")
    }

    /// Rank-deficient `rows x cols` matrices, flattened row-major. The distance to
    /// this set is the smallest singular value.
    pub fn rank_deficient_matrices(rows: usize, cols: usize) -> Self {
        Self::distance(rows * cols, move |x| {
            LinearMap::from_raw(rows, cols, x.to_vec()).smallest_singular_value()
        })
    }

    /// Zero set of a polynomial, with membership `|P(x)| <= tol`.
    pub fn zero_set(dim: usize, p: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, tol: f64) -> Self {
        Self::membership(dim, move |x| p(x).abs() <= tol)
    }

    /// The unit circle `x^2 + y^2 = 1`.
    pub fn unit_circle(tol: f64) -> Self {
        Self::zero_set(2, |x| x[0] * x[0] + x[1] * x[1] - 1.0, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn affine_structure(&self) -> Option<&AffineSet> {
        self.affine.as_ref()
    }

    pub fn is_distance(&self) -> bool {
        matches!(self.kind, OracleKind::Distance(_))
    }

    /// Distance when available.
    pub fn eval_distance(&self, x: &[f64]) -> Option<f64> {
        match &self.kind {
            OracleKind::Distance(f) => Some(f(x)),
            OracleKind::Membership(_) => None,
        }
    }

    /// Membership; distance oracles report `dist <= tol`.
    pub fn is_member(&self, x: &[f64], tol: f64) -> bool {
        match &self.kind {
            OracleKind::Distance(f) => f(x) <= tol,
            OracleKind::Membership(f) => f(x),
        }
    }

    /// Largest observed `|d(a) - d(b)| / |a - b|` over random pairs in `B(center, radius)`.
    pub fn lipschitz_spot_check(&self, center: &[f64], radius: f64, pairs: usize, seed: u64) -> Option<f64> {
        let OracleKind::Distance(f) = &self.kind else {
            return None;
        };
        let mut rng = stream(seed, 0);
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let a = uniform_in_ball(&mut rng, center, radius);
            let b = uniform_in_ball(&mut rng, center, radius);
            let gap = crate::linalg::distance(&a, &b);
            if gap > 1e-12 {
                worst = worst.max((f(&a) - f(&b)).abs() / gap);
            }
        }
        Some(worst)
    }

    /// The preimage `f^{-1}(Y)` of this set under `f: R^n -> R^dim`.
    ///
    /// Affine targets pull back exactly (`P f z = P b` with `P` projecting off the
    /// directions); other distance targets use the lower bound `dist(f z, Y) / |f|`;
    /// membership targets compose with `f`.
    pub fn pullback(&self, f: &LinearMap, rank_tol: f64) -> Result<SetOracle> {
        check_dim(self.dim, f.rows())?;
        let n = f.cols();
        if let Some(aff) = &self.affine {
            let perp = aff.directions.complement();
            let rows: Vec<Vector> = perp.basis().iter().map(|a| f.apply_transpose(a)).collect();
            if rows.is_empty() {
                return Ok(SetOracle::whole_space(n));
            }
            let g = LinearMap::from_rows(&rows.iter().map(|r| r.as_slice().to_vec()).collect::<Vec<_>>())?;
            let c: Vec<f64> = perp.basis().iter().map(|a| crate::linalg::dot(a, &aff.point)).collect();
            let z0 = g.least_norm_solution(&c, rank_tol, 1e-8)?;
            return SetOracle::affine(z0, g.kernel(rank_tol));
        }
        let f = f.clone();
        Ok(match &self.kind {
            OracleKind::Distance(d) => {
                let d = d.clone();
                let scale = f.operator_norm().max(1e-300);
                SetOracle::distance(n, move |z| d(&f.apply(z)) / scale)
            }
            OracleKind::Membership(m) => {
                let m = m.clone();
                SetOracle::membership(n, move |z| m(&f.apply(z)))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_distance() {
        let h = SetOracle::hyperplane(&Vector::new(vec![0.0, 0.0, 2.0]).unwrap(), 2.0).unwrap();
        assert!((h.eval_distance(&[5.0, -1.0, 3.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(h.is_member(&[1.0, 1.0, 1.0], 1e-12));
    }

    #[test]
    fn rank_deficient_distance_is_sigma_min() {
        let o = SetOracle::rank_deficient_matrices(2, 2);
        assert!((o.eval_distance(&[1.0, 0.0, 0.0, 0.25]).unwrap() - 0.25).abs() < 1e-12);
        let lip = o.lipschitz_spot_check(&[1.0, 0.0, 0.0, 0.0], 0.5, 2000, 3).unwrap();
        assert!(lip <= 1.0 + 1e-9, "{lip}");
    }

    #[test]
    fn affine_pullback_is_exact() {
        // f = projection to x, Y = {0}: f^{-1}(Y) is the y-axis
        let f = LinearMap::from_rows(&[[1.0, 0.0]]).unwrap();
        let y = SetOracle::point(Vector::new(vec![0.0]).unwrap());
        let pb = y.pullback(&f, 1e-9).unwrap();
        assert!((pb.eval_distance(&[0.3, 7.0]).unwrap() - 0.3).abs() < 1e-12);
        // scaled map gives the same preimage
        let f2 = LinearMap::from_rows(&[[2.0, 0.0]]).unwrap();
        let pb2 = y.pullback(&f2, 1e-9).unwrap();
        assert!((pb2.eval_distance(&[0.3, 7.0]).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn circle_membership() {
        let c = SetOracle::unit_circle(1e-9);
        assert!(c.is_member(&[1.0, 0.0], 0.0));
        assert!(!c.is_member(&[0.5, 0.0], 0.0));
        assert!(c.eval_distance(&[0.0, 0.0]).is_none());
    }
}

use serde::Serialize;

use super::dd;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm, Subspace, Vector};
use crate::lp::{lp_solve_with_tol, LpOutcome, LpProblem};
use crate::tolerance::Tolerances;

/// Desk-scale limits for double description.
pub const DD_MAX_AMBIENT_DIM: usize = 8;
pub const DD_MAX_GENERATORS: usize = 32;

/// Closed-form cones handled by analytic oracles instead of generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticCone {
    /// `{ (w, z) : z >= |w| }`.
    SecondOrder,
    /// `{ (x, y, z) : x >= 0, z >= 0, x z >= |y|^2 }`.
    RotatedSecondOrder,
}

/// A closed convex cone: finitely generated (with optional facets) or analytic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeRep {
    ambient_dim: usize,
    generators: Vec<Vector>,
    facets: Option<Vec<Vector>>,
    hull: Subspace,
    analytic: Option<AnalyticCone>,
}

/// Unit direction of an open ray from the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RayDirection(Vector);

impl RayDirection {
    /// Normalizes `v`; fails on the zero vector.
    pub fn new(v: &[f64]) -> Result<Self> {
        let v = Vector::new(v.to_vec())?;
        v.normalized()
            .map(RayDirection)
            .ok_or_else(|| Error::InvalidInput("ray direction must be nonzero".into()))
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }
}

impl std::ops::Deref for RayDirection {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AnalyticCone {
    pub fn min_dim(self) -> usize {
        match self {
            AnalyticCone::SecondOrder => 2,
            AnalyticCone::RotatedSecondOrder => 3,
        }
    }

    /// Linear change of coordinates `v -> (w, t)` taking the cone onto the standard
    /// second-order cone `t >= |w|`. Identity for the second-order cone itself.
    pub fn to_standard(self, v: &[f64]) -> Vec<f64> {
        match self {
            AnalyticCone::SecondOrder => v.to_vec(),
            AnalyticCone::RotatedSecondOrder => {
                let n = v.len();
                let s2 = std::f64::consts::SQRT_2;
                let (x, z) = (v[0], v[n - 1]);
                let mut out = Vec::with_capacity(n);
                out.push((x - z) / s2);
                out.extend(v[1..n - 1].iter().map(|y| s2 * y));
                out.push((x + z) / s2);
                out
            }
        }
    }

    /// Inverse of [`AnalyticCone::to_standard`].
    pub fn from_standard(self, q: &[f64]) -> Vec<f64> {
        match self {
            AnalyticCone::SecondOrder => q.to_vec(),
            AnalyticCone::RotatedSecondOrder => {
                let n = q.len();
                let s2 = std::f64::consts::SQRT_2;
                let (s, t) = (q[0], q[n - 1]);
                let mut out = Vec::with_capacity(n);
                out.push((t + s) / s2);
                out.extend(q[1..n - 1].iter().map(|w| w / s2));
                out.push((t - s) / s2);
                out
            }
        }
    }

    pub fn contains(self, v: &[f64], tol: f64) -> bool {
        let n = v.len();
        match self {
            AnalyticCone::SecondOrder => v[n - 1] >= norm(&v[..n - 1]) - tol,
            AnalyticCone::RotatedSecondOrder => {
                let (x, z) = (v[0], v[n - 1]);
                let y2: f64 = v[1..n - 1].iter().map(|y| y * y).sum();
                x >= -tol && z >= -tol && x * z >= y2 - tol
            }
        }
    }

    pub fn ri_contains(self, v: &[f64], tol: f64) -> bool {
        let n = v.len();
        let vn = norm(v);
        if vn == 0.0 {
            return false;
        }
        match self {
            AnalyticCone::SecondOrder => v[n - 1] > norm(&v[..n - 1]) + tol * vn,
            AnalyticCone::RotatedSecondOrder => {
                let (x, z) = (v[0], v[n - 1]);
                let y2: f64 = v[1..n - 1].iter().map(|y| y * y).sum();
                x > tol * vn && z > tol * vn && x * z - y2 > tol * vn * vn
            }
        }
    }

    /// Axis direction: `e_n` for the second-order cone, `(e_x + e_z)/sqrt(2)` for the
    /// rotated one.
    pub fn axis(self, n: usize) -> Vector {
        let mut v = vec![0.0; n];
        match self {
            AnalyticCone::SecondOrder => v[n - 1] = 1.0,
            AnalyticCone::RotatedSecondOrder => {
                v[0] = std::f64::consts::FRAC_1_SQRT_2;
                v[n - 1] = std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        Vector::from_raw(v)
    }
}

impl ConeRep {
    /// The cone generated by nonzero `generators` in `R^ambient_dim`.
    /// Facets are not computed; see [`ConeRep::with_facets`].
    pub fn finitely_generated(ambient_dim: usize, generators: Vec<Vector>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be >= 1".into()));
        }
        for g in &generators {
            check_dim(ambient_dim, g.dim())?;
            if g.norm() == 0.0 {
                return Err(Error::InvalidInput("cone generators must be nonzero".into()));
            }
        }
        let units: Vec<Vector> = generators
            .iter()
            .map(|g| g.normalized().expect("nonzero"))
            .collect();
        let hull = linalg::span(ambient_dim, &units, Tolerances::default().rank);
        let facets = generators.is_empty().then(Vec::new);
        Ok(Self {
            ambient_dim,
            generators,
            facets,
            hull,
            analytic: None,
        })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            generators: Vec::new(),
            facets: Some(Vec::new()),
            hull: Subspace::zero(ambient_dim),
            analytic: None,
        }
    }

    pub fn analytic(kind: AnalyticCone, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < kind.min_dim() {
            return Err(Error::InvalidInput(format!(
                "{kind:?} cone needs dimension >= {}",
                kind.min_dim()
            )));
        }
        Ok(Self {
            ambient_dim,
            generators: Vec::new(),
            facets: None,
            hull: Subspace::whole(ambient_dim),
            analytic: Some(kind),
        })
    }

    /// Nonnegative orthant of `R^n`.
    pub fn orthant(n: usize) -> Self {
        let gens = (0..n).map(|i| Vector::basis(n, i)).collect();
        Self::finitely_generated(n, gens)
            .expect("orthant generators are valid")
            .with_facets()
            .expect("orthant within desk scale")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn facets(&self) -> Option<&[Vector]> {
        self.facets.as_deref()
    }

    pub fn hull(&self) -> &Subspace {
        &self.hull
    }

    /// Dimension of the hull (`p = dim aff K`).
    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn analytic_tag(&self) -> Option<AnalyticCone> {
        self.analytic
    }

    pub fn is_polyhedral(&self) -> bool {
        self.analytic.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.analytic.is_none() && self.hull.dim() == 0
    }

    /// True when the cone equals its hull (a linear subspace).
    pub fn is_subspace(&self) -> bool {
        self.is_polyhedral() && self.facets.as_ref().is_some_and(|f| f.is_empty())
    }

    pub fn with_facets(self) -> Result<Self> {
        dd_convert(&self)
    }

    /// Unit generators of a polyhedral cone.
    pub fn unit_generators(&self) -> Vec<Vector> {
        self.generators
            .iter()
            .map(|g| g.normalized().expect("generators are nonzero"))
            .collect()
    }

    /// Membership within absolute tolerance `tol`.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if let Some(kind) = self.analytic {
            return kind.contains(v, tol);
        }
        if self.hull.residual(v) > tol {
            return false;
        }
        match &self.facets {
            Some(facets) => facets.iter().all(|a| dot(a, v) >= -tol),
            None => self.contains_by_lp(v, tol),
        }
    }

    fn contains_by_lp(&self, v: &[f64], tol: f64) -> bool {
        // min |G λ - v|_1 over λ >= 0
        let k = self.generators.len();
        let n = self.ambient_dim;
        let nv = k + 2 * n;
        let mut objective = vec![0.0; nv];
        for o in objective.iter_mut().skip(k) {
            *o = -1.0;
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut r = vec![0.0; nv];
                for (j, g) in self.generators.iter().enumerate() {
                    r[j] = g[i];
                }
                r[k + i] = 1.0;
                r[k + n + i] = -1.0;
                r
            })
            .collect();
        let Ok(p) = LpProblem::nonnegative(objective, rows, v.to_vec()) else {
            return false;
        };
        matches!(lp_solve_with_tol(&p, Tolerances::default().lp),
            Ok(LpOutcome::Optimal { value, .. }) if -value <= tol)
    }

    /// Relative-interior membership with strictness margin `tol * |v|`.
    pub fn ri_contains(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if let Some(kind) = self.analytic {
            return kind.ri_contains(v, tol);
        }
        let vn = norm(v);
        if self.is_zero() || vn == 0.0 {
            return false;
        }
        if self.hull.residual(v) > tol.max(1e-10) * vn {
            return false;
        }
        match &self.facets {
            Some(facets) => facets.iter().all(|a| dot(a, v) > tol * vn),
            None => self.ri_contains_by_lp(v, tol),
        }
    }

    /// `v` is in the relative interior iff `v = Σ λ_i g_i` with every `λ_i > 0`.
    fn ri_contains_by_lp(&self, v: &[f64], tol: f64) -> bool {
        let g = self.unit_generators();
        let k = g.len();
        let n = self.ambient_dim;
        let vn = norm(v);
        // variables: λ (k), s, slack (k); maximize s
        let nv = 2 * k + 1;
        let mut objective = vec![0.0; nv];
        objective[k] = 1.0;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            let mut r = vec![0.0; nv];
            for (j, gj) in g.iter().enumerate() {
                r[j] = gj[i];
            }
            rows.push(r);
            rhs.push(v[i] / vn);
        }
        for j in 0..k {
            let mut r = vec![0.0; nv];
            r[j] = 1.0;
            r[k] = -1.0;
            r[k + 1 + j] = -1.0;
            rows.push(r);
            rhs.push(0.0);
        }
        let mut lower = vec![Some(0.0); nv];
        lower[k] = None;
        let Ok(p) = LpProblem::new(objective, rows, rhs, lower) else {
            return false;
        };
        match lp_solve_with_tol(&p, Tolerances::default().lp) {
            Ok(LpOutcome::Optimal { value, .. }) => value > tol,
            Ok(LpOutcome::Unbounded) => true,
            _ => false,
        }
    }

    /// A direction in the relative interior: normalized sum of unit generators for
    /// polyhedral cones, the axis for analytic ones.
    pub fn ri_point(&self) -> Result<RayDirection> {
        if let Some(kind) = self.analytic {
            return Ok(RayDirection(kind.axis(self.ambient_dim)));
        }
        if self.is_zero() {
            return Err(Error::ZeroCone);
        }
        let mut sum = vec![0.0; self.ambient_dim];
        for g in self.unit_generators() {
            for (s, x) in sum.iter_mut().zip(g.iter()) {
                *s += x;
            }
        }
        let sum = Vector::from_raw(sum);
        if sum.norm() > 1e-9 {
            return Ok(RayDirection(sum.normalized().expect("nonzero")));
        }
        // generators sum to zero only when the cone is a subspace: any hull vector works
        Ok(RayDirection(self.hull.basis()[0].clone()))
    }
}

/// Populates facets (unit normals inside the hull) of a finitely generated cone.
///
/// The cone equals `{ v in hull : <a_j, v> >= 0 for all j }` for the returned facets.
pub fn dd_convert(rep: &ConeRep) -> Result<ConeRep> {
    if rep.analytic.is_some() {
        return Err(Error::NotApplicable("double description needs a finitely generated cone".into()));
    }
    if rep.ambient_dim > DD_MAX_AMBIENT_DIM || rep.generators.len() > DD_MAX_GENERATORS {
        return Err(Error::ScaleExceeded(format!(
            "double description limited to dimension {DD_MAX_AMBIENT_DIM} and {DD_MAX_GENERATORS} generators (got {} and {})",
            rep.ambient_dim,
            rep.generators.len()
        )));
    }
    let mut out = rep.clone();
    let p = rep.hull.dim();
    if p == 0 {
        out.facets = Some(Vec::new());
        return Ok(out);
    }
    let snap = Tolerances::default().snap;
    let coords: Vec<Vec<f64>> = rep
        .unit_generators()
        .iter()
        .map(|g| rep.hull.coordinates(g))
        .collect();
    let dual = dd::extreme_rays(p, &coords, snap)?;
    let mut facets: Vec<Vector> = dual
        .rays
        .iter()
        .map(|a| rep.hull.lift(a).normalized().expect("unit coordinates"))
        .collect();
    // lineality in the dual means the cone is flat along it: record both signs
    for l in &dual.lineality {
        let a = rep.hull.lift(l).normalized().expect("unit coordinates");
        facets.push(a.scaled(-1.0));
        facets.push(a);
    }
    out.facets = Some(facets);
    Ok(out)
}

/// Generators of `{ v in hull : <a_j, v> >= 0 }` (extreme rays plus both signs of a
/// lineality basis).
pub fn generators_from_facets(hull: &Subspace, facets: &[Vector]) -> Result<Vec<Vector>> {
    let p = hull.dim();
    if p == 0 {
        return Ok(Vec::new());
    }
    let coords: Vec<Vec<f64>> = facets.iter().map(|a| hull.coordinates(a)).collect();
    let res = dd::extreme_rays(p, &coords, Tolerances::default().snap)?;
    let mut gens: Vec<Vector> = res.rays.iter().map(|r| hull.lift(r)).collect();
    for l in &res.lineality {
        let v = hull.lift(l);
        gens.push(v.scaled(-1.0));
        gens.push(v);
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    fn has(facets: &[Vector], target: &[f64]) -> bool {
        facets.iter().any(|f| close(f, target))
    }

    #[test]
    fn orthant_facets() {
        let k = ConeRep::orthant(2);
        let f = k.facets().unwrap();
        assert_eq!(f.len(), 2);
        assert!(has(f, &[1.0, 0.0]) && has(f, &[0.0, 1.0]));
    }

    #[test]
    fn two_ray_cone_facets() {
        // edge normals by hand: (0,1) and (1,-1)/sqrt2
        let k = ConeRep::finitely_generated(2, vec![v(&[1.0, 0.0]), v(&[1.0, 1.0])])
            .unwrap()
            .with_facets()
            .unwrap();
        let f = k.facets().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(f.len(), 2);
        assert!(has(f, &[0.0, 1.0]));
        assert!(has(f, &[h, -h]));
        assert_eq!(k.dim(), 2);
    }

    #[test]
    fn single_ray_collapses_hull() {
        let k = ConeRep::finitely_generated(2, vec![v(&[1.0, 0.0])])
            .unwrap()
            .with_facets()
            .unwrap();
        assert_eq!(k.dim(), 1);
        let f = k.facets().unwrap();
        assert_eq!(f.len(), 1);
        assert!(close(&f[0], &[1.0, 0.0]));
        assert!(k.ri_contains(&[1.0, 0.0], 1e-9));
        assert!(!k.ri_contains(&[-1.0, 0.0], 1e-9));
        assert!(!k.ri_contains(&[1.0, 0.1], 1e-9));
    }

    #[test]
    fn zero_cone_conventions() {
        let k = ConeRep::finitely_generated(3, vec![]).unwrap();
        assert!(k.is_zero());
        assert_eq!(k.facets().unwrap().len(), 0);
        assert!(!k.ri_contains(&[1.0, 0.0, 0.0], 1e-9));
        assert!(k.contains(&[0.0, 0.0, 0.0], 1e-9));
        assert!(matches!(k.ri_point(), Err(Error::ZeroCone)));
    }

    #[test]
    fn subspace_cone_has_no_facets() {
        let k = ConeRep::finitely_generated(
            2,
            vec![v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])],
        )
        .unwrap()
        .with_facets()
        .unwrap();
        assert!(k.is_subspace());
        assert!(k.ri_contains(&[0.3, -2.0], 1e-9));
        let u = k.ri_point().unwrap();
        assert!(k.ri_contains(&u, 1e-9));
    }

    #[test]
    fn analytic_membership() {
        let soc = ConeRep::analytic(AnalyticCone::SecondOrder, 3).unwrap();
        assert!(soc.contains(&[0.0, 0.0, 1.0], 1e-9));
        assert!(!soc.contains(&[1.0, 0.0, 0.5], 1e-9));
        assert!(soc.ri_contains(&[0.0, 0.0, 1.0], 1e-9));
        let rsoc = ConeRep::analytic(AnalyticCone::RotatedSecondOrder, 3).unwrap();
        assert!(rsoc.contains(&[1.0, 1.0, 1.0], 1e-9));
        assert!(!rsoc.ri_contains(&[1.0, 1.0, 1.0], 1e-9));
        assert!(rsoc.contains(&[1.0, 0.0, 0.0], 1e-9));
        assert!(!rsoc.contains(&[-1.0, 0.0, -1.0], 1e-9));
        assert!(ConeRep::analytic(AnalyticCone::RotatedSecondOrder, 2).is_err());
    }

    #[test]
    fn standard_coordinates_round_trip() {
        let kind = AnalyticCone::RotatedSecondOrder;
        let x = [0.3, -1.2, 0.7, 2.0];
        let back = kind.from_standard(&kind.to_standard(&x));
        assert!(close(&back, &x));
        // x z >= |y|^2  <=>  t >= |w|
        for p in [[1.0, 1.0, 1.0], [2.0, 1.0, 0.5], [1.0, 2.0, 1.0]] {
            let q = kind.to_standard(&p);
            let std_in = q[2] >= norm(&q[..2]) - 1e-12;
            assert_eq!(std_in, kind.contains(&p, 1e-12), "{p:?}");
        }
    }

    #[test]
    fn ri_point_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&ConeRep::orthant(2).ri_point().unwrap(), &[h, h]));
        let soc = ConeRep::analytic(AnalyticCone::SecondOrder, 3).unwrap();
        assert!(close(&soc.ri_point().unwrap(), &[0.0, 0.0, 1.0]));
        let k = ConeRep::finitely_generated(2, vec![v(&[2.0, 1.0]), v(&[1.0, 2.0])]).unwrap();
        assert!(close(&k.ri_point().unwrap(), &[h, h]));
    }

    #[test]
    fn lp_fallbacks_agree_with_facets() {
        let gens = vec![v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, 1.0]), v(&[-1.0, 0.0, 1.0]), v(&[0.0, -1.0, 1.0])];
        let bare = ConeRep::finitely_generated(3, gens).unwrap();
        let full = bare.clone().with_facets().unwrap();
        for p in [[0.0, 0.0, 1.0], [0.5, 0.5, 1.0], [1.0, 0.0, 1.0], [0.9, 0.0, 1.0], [1.1, 0.0, 1.0], [0.0, 0.0, -1.0]] {
            assert_eq!(bare.contains(&p, 1e-9), full.contains(&p, 1e-9), "{p:?}");
            assert_eq!(bare.ri_contains(&p, 1e-9), full.ri_contains(&p, 1e-9), "{p:?}");
        }
    }
}

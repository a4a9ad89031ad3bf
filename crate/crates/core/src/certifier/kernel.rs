//! Tests of how `ker T` meets a cone: trivially, through the relative interior, or
//! only along the boundary.

use serde::Serialize;

use crate::convex::{AnalyticCone, ConeRep, RayDirection};
use crate::error::Result;
use crate::linalg::{LinearMap, Subspace, Vector};
use crate::lp::{lp_solve_with_tol, LpOutcome, LpProblem};
use crate::tolerance::Tolerances;

/// Outcome of the `K ∩ ker T = {0}` test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSearch {
    pub trivial: bool,
    /// Unit vector of `K ∩ ker T` when the intersection is nontrivial.
    pub witness: Option<Vector>,
}

/// Outcome of the `ri K ∩ ker T ≠ ∅` test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiSearch {
    pub nonempty: bool,
    pub ray: Option<RayDirection>,
}

/// Orthonormal rows spanning the numeric row space of `T`; `T v = 0` iff `W v = 0`.
pub(crate) fn row_space(t: &LinearMap, tol: &Tolerances) -> Vec<Vec<f64>> {
    let svd = t.svd();
    let r = svd.rank(tol.rank);
    svd.right_vectors()[..r].to_vec()
}

fn project_out(v: &[f64], rows: &[Vec<f64>]) -> Vector {
    let mut out = v.to_vec();
    for w in rows {
        let c = crate::linalg::dot(w, &out);
        for (o, wi) in out.iter_mut().zip(w) {
            *o -= c * wi;
        }
    }
    Vector::from_raw(out)
}

/// Closed form for analytic cones. In standard coordinates the cone is
/// `t >= |w|`; a unit vector of the image `L` of the kernel lies in it iff its
/// `t` component is at least `1/sqrt 2`, and the largest such component is
/// `h = |P_L e_t|`. Returns the margin `h - sqrt(1 - h^2)` and the maximizing
/// direction mapped back to original coordinates.
pub(crate) fn analytic_kernel_margin(
    kind: AnalyticCone,
    kernel: &Subspace,
) -> Option<(f64, Vector)> {
    if kernel.dim() == 0 {
        return None;
    }
    let n = kernel.ambient_dim();
    let mapped: Vec<Vector> = kernel
        .basis()
        .iter()
        .map(|b| Vector::from_raw(kind.to_standard(b)))
        .collect();
    let l = Subspace::orthonormalize(n, &mapped);
    let p = l.project_onto(Vector::basis(n, n - 1).as_slice());
    let h = p.norm().min(1.0);
    let margin = h - (1.0 - h * h).max(0.0).sqrt();
    let dir = if h > 1e-15 {
        p.scaled(1.0 / h)
    } else {
        l.basis()[0].clone()
    };
    let back = Vector::from_raw(kind.from_standard(&dir));
    let back = back.normalized()?;
    Some((margin, project_to(kernel, &back)))
}

fn project_to(space: &Subspace, v: &Vector) -> Vector {
    let p = space.project_onto(v);
    p.normalized().unwrap_or_else(|| v.clone())
}

fn unit_columns(k: &ConeRep, rows: &[Vec<f64>]) -> (Vec<Vector>, Vec<Vec<f64>>) {
    let g = k.unit_generators();
    let a: Vec<Vec<f64>> = rows
        .iter()
        .map(|w| g.iter().map(|gj| crate::linalg::dot(w, gj)).collect())
        .collect();
    (g, a)
}

fn combine(g: &[Vector], lambda: &[f64], n: usize) -> Vector {
    let mut v = vec![0.0; n];
    for (gj, l) in g.iter().zip(lambda) {
        for (vi, x) in v.iter_mut().zip(gj.iter()) {
            *vi += l * x;
        }
    }
    Vector::from_raw(v)
}

pub fn kernel_cone_trivial(t: &LinearMap, k: &ConeRep) -> Result<KernelSearch> {
    kernel_cone_trivial_with(t, k, &Tolerances::default())
}

pub(crate) fn kernel_cone_trivial_with(
    t: &LinearMap,
    k: &ConeRep,
    tol: &Tolerances,
) -> Result<KernelSearch> {
    crate::error::check_dim(k.ambient_dim(), t.cols())?;
    let trivial = KernelSearch {
        trivial: true,
        witness: None,
    };
    if k.is_zero() {
        return Ok(trivial);
    }
    if let Some(kind) = k.analytic_tag() {
        let kernel = t.kernel(tol.rank);
        return Ok(match analytic_kernel_margin(kind, &kernel) {
            Some((margin, dir)) if margin >= -tol.lp => KernelSearch {
                trivial: false,
                witness: Some(dir),
            },
            _ => trivial,
        });
    }
    let rows = row_space(t, tol);
    let (g, a) = unit_columns(k, &rows);
    let n = k.ambient_dim();
    // any nonzero v in K has <g_i, v> > 0 for some generator, so normalizing one
    // inner product at a time covers every direction
    for gi in &g {
        let mut eq = a.clone();
        eq.push(g.iter().map(|gj| crate::linalg::dot(gi, gj)).collect());
        let mut rhs = vec![0.0; rows.len()];
        rhs.push(1.0);
        let p = LpProblem::nonnegative(vec![0.0; g.len()], eq, rhs)?;
        if let LpOutcome::Optimal { solution, .. } = lp_solve_with_tol(&p, tol.lp)? {
            let v = project_out(&combine(&g, &solution, n), &rows);
            if let Some(w) = v.normalized() {
                return Ok(KernelSearch {
                    trivial: false,
                    witness: Some(w),
                });
            }
        }
    }
    Ok(trivial)
}

pub fn ri_kernel_nonempty(t: &LinearMap, k: &ConeRep) -> Result<RiSearch> {
    ri_kernel_nonempty_with(t, k, &Tolerances::default())
}

pub(crate) fn ri_kernel_nonempty_with(
    t: &LinearMap,
    k: &ConeRep,
    tol: &Tolerances,
) -> Result<RiSearch> {
    crate::error::check_dim(k.ambient_dim(), t.cols())?;
    let empty = RiSearch {
        nonempty: false,
        ray: None,
    };
    if k.is_zero() {
        return Ok(empty);
    }
    if let Some(kind) = k.analytic_tag() {
        let kernel = t.kernel(tol.rank);
        return match analytic_kernel_margin(kind, &kernel) {
            Some((margin, dir)) if margin > tol.lp => Ok(RiSearch {
                nonempty: true,
                ray: Some(RayDirection::new(&dir)?),
            }),
            _ => Ok(empty),
        };
    }
    let hull_kernel = kernel_within(t, k.hull(), tol)?;
    if k.is_subspace() {
        // ri K = K, so any unit vector of ker T ∩ K will do
        return Ok(match hull_kernel.basis().first() {
            Some(b) => RiSearch {
                nonempty: true,
                ray: Some(RayDirection::new(b)?),
            },
            None => empty,
        });
    }
    let rows = row_space(t, tol);
    let (g, a) = unit_columns(k, &rows);
    let kn = g.len();
    // variables: λ (kn), s, μ (kn slacks for λ_j - s >= 0), σ (slack for s <= 1)
    let nv = 2 * kn + 2;
    let s = kn;
    let mut objective = vec![0.0; nv];
    objective[s] = 1.0;
    let mut eq = Vec::new();
    let mut rhs = Vec::new();
    for row in &a {
        let mut r = vec![0.0; nv];
        r[..kn].copy_from_slice(row);
        eq.push(r);
        rhs.push(0.0);
    }
    for j in 0..kn {
        let mut r = vec![0.0; nv];
        r[j] = 1.0;
        r[s] = -1.0;
        r[s + 1 + j] = -1.0;
        eq.push(r);
        rhs.push(0.0);
    }
    let mut sum = vec![0.0; nv];
    sum[..kn].iter_mut().for_each(|x| *x = 1.0);
    eq.push(sum);
    rhs.push(1.0);
    let mut cap = vec![0.0; nv];
    cap[s] = 1.0;
    cap[nv - 1] = 1.0;
    eq.push(cap);
    rhs.push(1.0);
    let mut lower = vec![Some(0.0); nv];
    lower[s] = None;
    let p = LpProblem::new(objective, eq, rhs, lower)?;
    let LpOutcome::Optimal { solution, value } = lp_solve_with_tol(&p, tol.lp)? else {
        return Ok(empty);
    };
    if value <= tol.lp {
        return Ok(empty);
    }
    let v = combine(&g, &solution.as_slice()[..kn], k.ambient_dim());
    let projected = hull_kernel.project_onto(&v);
    match projected.normalized() {
        Some(u) => Ok(RiSearch {
            nonempty: true,
            ray: Some(RayDirection::new(&u)?),
        }),
        None => Ok(empty),
    }
}

/// `ker T ∩ Y` as `Q ker(T Q)`.
pub(crate) fn kernel_within(t: &LinearMap, y: &Subspace, tol: &Tolerances) -> Result<Subspace> {
    let Some(tq) = t.restrict_to(y)? else {
        return Ok(Subspace::zero(t.cols()));
    };
    let inner = tq.kernel(tol.rank);
    let lifted: Vec<Vector> = inner.basis().iter().map(|c| y.lift(c)).collect();
    Ok(Subspace::orthonormalize(t.cols(), &lifted))
}

//! Estimation of `min { |T v| : v ∈ K, |v| = 1 }`.
//!
//! The ratio `|T M q|^2 / |M q|^2` is minimized over a parameter cone: `q = λ >= 0`
//! with `M = G` (generator matrix) for polyhedral cones, and `q` in the standard
//! second-order cone with `M` the inverse coordinate change for analytic cones.

use rand::Rng;
use serde::Serialize;

use crate::convex::ConeRep;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, LinearMap, Subspace, Vector};
use crate::rng::{derive_seed, gaussian_vec, stream, StreamRng};
use crate::tolerance::Tolerances;

/// Absolute slack subtracted from the estimate.
pub const RADIUS_SLACK: f64 = 1e-6;

const ORACLE_SEED: u64 = 0x5241_4449_5553;
const MAX_ITERS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusOptions {
    pub starts: usize,
    pub oracle_samples: usize,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            oracle_samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// `max(0, min(descent, oracle) - slack)`.
    pub value: f64,
    pub descent: f64,
    pub oracle: f64,
    /// Unit minimizer found by descent.
    pub argmin: Option<Vector>,
}

enum Param {
    Poly { g: Vec<Vector> },
    Analytic,
}

struct Problem<'a> {
    param: Param,
    /// `T M`, row-major `m x d`.
    tm: Vec<Vec<f64>>,
    /// `M` as `d` columns of length `n`.
    cols: Vec<Vec<f64>>,
    t: &'a LinearMap,
    k: &'a ConeRep,
}

impl<'a> Problem<'a> {
    fn new(t: &'a LinearMap, k: &'a ConeRep) -> Self {
        let n = k.ambient_dim();
        let (param, cols) = match k.analytic_tag() {
            Some(kind) => {
                let cols = (0..n)
                    .map(|j| kind.from_standard(Vector::basis(n, j).as_slice()))
                    .collect::<Vec<Vec<f64>>>();
                (Param::Analytic, cols)
            }
            None => {
                let g = k.unit_generators();
                let cols = g.iter().map(|v| v.as_slice().to_vec()).collect();
                (Param::Poly { g }, cols)
            }
        };
        let tcols: Vec<Vector> = cols.iter().map(|c: &Vec<f64>| t.apply(c)).collect();
        let tm = (0..t.rows())
            .map(|i| tcols.iter().map(|c| c[i]).collect())
            .collect();
        Self { param, tm, cols, t, k }
    }

    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn lift(&self, q: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.k.ambient_dim()];
        for (c, qj) in self.cols.iter().zip(q) {
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi += qj * ci;
            }
        }
        v
    }

    fn image(&self, q: &[f64]) -> Vec<f64> {
        self.tm.iter().map(|row| dot(row, q)).collect()
    }

    /// Ratio and its gradient; `None` where `M q` vanishes.
    fn eval(&self, q: &[f64]) -> Option<(f64, Vec<f64>)> {
        let b = self.lift(q);
        let bb = dot(&b, &b);
        if bb < 1e-24 {
            return None;
        }
        let a = self.image(q);
        let r = dot(&a, &a) / bb;
        let d = self.dim();
        let mut grad = vec![0.0; d];
        for (j, g) in grad.iter_mut().enumerate() {
            let ata: f64 = self.tm.iter().zip(&a).map(|(row, ai)| row[j] * ai).sum();
            *g = 2.0 * (ata - r * dot(&self.cols[j], &b)) / bb;
        }
        Some((r, grad))
    }

    fn ratio(&self, q: &[f64]) -> Option<f64> {
        let b = self.lift(q);
        let bb = dot(&b, &b);
        if bb < 1e-24 {
            return None;
        }
        let a = self.image(q);
        Some(dot(&a, &a) / bb)
    }

    /// Projection onto the parameter cone followed by scale normalization.
    fn project(&self, q: &[f64]) -> Option<Vec<f64>> {
        match self.param {
            Param::Poly { .. } => {
                let p: Vec<f64> = q.iter().map(|x| x.max(0.0)).collect();
                let s: f64 = p.iter().sum();
                (s > 1e-300).then(|| p.iter().map(|x| x / s).collect())
            }
            Param::Analytic => {
                let p = project_soc(q);
                let nn = norm(&p);
                (nn > 1e-300).then(|| p.iter().map(|x| x / nn).collect())
            }
        }
    }

    fn descend(&self, start: Vec<f64>) -> Option<(f64, Vec<f64>)> {
        let mut q = self.project(&start)?;
        let (mut r, mut grad) = self.eval(&q)?;
        let mut step = 1.0;
        for _ in 0..MAX_ITERS {
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = q.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
                if let Some(qn) = self.project(&trial) {
                    if let Some((rn, gn)) = self.eval(&qn) {
                        let decrease: f64 =
                            grad.iter().zip(q.iter().zip(&qn)).map(|(g, (a, b))| g * (a - b)).sum();
                        if rn <= r - 1e-4 * decrease.max(0.0) {
                            accepted = Some((qn, rn, gn));
                            break;
                        }
                    }
                }
                step *= 0.5;
            }
            let Some((qn, rn, gn)) = accepted else { break };
            let improvement = r - rn;
            q = qn;
            r = rn;
            grad = gn;
            step *= 2.0;
            if improvement <= 1e-16 * r.max(1e-300) {
                break;
            }
        }
        Some((r, q))
    }

    fn starts(&self, count: usize, rng: &mut StreamRng) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut out = Vec::new();
        match self.param {
            Param::Poly { .. } => {
                for j in 0..d {
                    let mut e = vec![0.0; d];
                    e[j] = 1.0;
                    out.push(e);
                }
                out.push(vec![1.0; d]);
                for i in 0..d {
                    for j in i + 1..d {
                        if out.len() >= count / 2 {
                            break;
                        }
                        let mut e = vec![0.0; d];
                        e[i] = 1.0;
                        e[j] = 1.0;
                        out.push(e);
                    }
                }
                while out.len() < count.max(d + 1 + count / 2) {
                    out.push(dirichlet(rng, d, out.len() % 2 == 0));
                }
            }
            Param::Analytic => {
                let mut axis = vec![0.0; d];
                axis[d - 1] = 1.0;
                out.push(axis);
                while out.len() < count {
                    let interior = out.len() % 2 == 0;
                    out.push(soc_sample(rng, d, interior));
                }
            }
        }
        out
    }

    /// Exact minimizer over the span of the active face, kept when it stays in `K`.
    fn polish(&self, q: &[f64], tol: &Tolerances) -> Option<f64> {
        let Param::Poly { g } = &self.param else {
            return None;
        };
        let qmax = q.iter().cloned().fold(0.0, f64::max);
        let active: Vec<Vector> = g
            .iter()
            .zip(q)
            .filter(|(_, &x)| x > 1e-9 * qmax)
            .map(|(gj, _)| gj.clone())
            .collect();
        let face = Subspace::orthonormalize(self.k.ambient_dim(), &active);
        self.subspace_min(&face, &self.lift(q), tol)
    }

    fn subspace_min(&self, space: &Subspace, reference: &[f64], tol: &Tolerances) -> Option<f64> {
        let tq = self.t.restrict_to(space).ok()??;
        let svd = tq.svd();
        let p = space.dim();
        let z = if p > svd.singular_values().len() {
            // more columns than rows: the map has a kernel on this face
            tq.kernel(0.0).basis().first()?.as_slice().to_vec()
        } else {
            svd.right_vectors().last()?.clone()
        };
        let mut v = space.lift(&z).normalized()?;
        if dot(&v, reference) < 0.0 {
            v = v.scaled(-1.0);
        }
        [v.clone(), v.scaled(-1.0)]
            .iter()
            .find(|c| self.k.contains(c, tol.membership))
            .map(|c| self.t.apply(c).norm())
    }

    fn oracle(&self, samples: usize, rng: &mut StreamRng) -> f64 {
        let d = self.dim();
        let mut best = f64::INFINITY;
        for i in 0..samples {
            let q = match self.param {
                Param::Poly { .. } => dirichlet(rng, d, i % 2 == 0),
                Param::Analytic => soc_sample(rng, d, i % 2 == 0),
            };
            if let Some(r) = self.ratio(&q) {
                best = best.min(r);
            }
        }
        best.sqrt()
    }
}

/// Euclidean projection onto `{ (w, t) : t >= |w| }`.
fn project_soc(q: &[f64]) -> Vec<f64> {
    let d = q.len();
    let t = q[d - 1];
    let wn = norm(&q[..d - 1]);
    if wn <= t {
        q.to_vec()
    } else if wn <= -t {
        vec![0.0; d]
    } else {
        let c = (wn + t) / 2.0;
        let mut out: Vec<f64> = q[..d - 1].iter().map(|w| c * w / wn).collect();
        out.push(c);
        out
    }
}

/// Random nonnegative weights; when `sparse`, supported on a random subset.
fn dirichlet(rng: &mut StreamRng, d: usize, sparse: bool) -> Vec<f64> {
    let keep = if sparse { rng.random_range(1..=d) } else { d };
    let mut w: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    if keep < d {
        let mut idx: Vec<usize> = (0..d).collect();
        for i in 0..d - keep {
            let j = rng.random_range(i..d);
            idx.swap(i, j);
            w[idx[i]] = 0.0;
        }
    }
    w
}

fn soc_sample(rng: &mut StreamRng, d: usize, interior: bool) -> Vec<f64> {
    let g = gaussian_vec(rng, d - 1);
    let gn = norm(&g).max(1e-300);
    let rho = if interior {
        rng.random::<f64>().powf(1.0 / (d - 1) as f64)
    } else {
        1.0
    };
    let mut q: Vec<f64> = g.iter().map(|x| rho * x / gn).collect();
    q.push(1.0);
    q
}

pub fn stability_radius_a(t: &LinearMap, k: &ConeRep) -> Result<f64> {
    Ok(stability_radius_report(t, k, &RadiusOptions::default(), &Tolerances::default())?.value)
}

/// Full estimate with diagnostics. Fails with `NotApplicable` unless
/// `K ∩ ker T = {0}`.
pub fn stability_radius_report(
    t: &LinearMap,
    k: &ConeRep,
    opts: &RadiusOptions,
    tol: &Tolerances,
) -> Result<RadiusEstimate> {
    let search = super::kernel::kernel_cone_trivial_with(t, k, tol)?;
    if !search.trivial {
        return Err(Error::NotApplicable(
            "the kernel meets the asymptotic cone outside the origin".into(),
        ));
    }
    Ok(estimate_unchecked(t, k, opts, tol))
}

pub(crate) fn estimate_unchecked(
    t: &LinearMap,
    k: &ConeRep,
    opts: &RadiusOptions,
    tol: &Tolerances,
) -> RadiusEstimate {
    if k.is_zero() {
        return RadiusEstimate {
            value: f64::INFINITY,
            descent: f64::INFINITY,
            oracle: f64::INFINITY,
            argmin: None,
        };
    }
    let problem = Problem::new(t, k);
    let mut rng = stream(derive_seed(ORACLE_SEED, (t.rows() * 1000 + t.cols()) as u64), 0);
    let mut best = f64::INFINITY;
    let mut argmin = None;
    for start in problem.starts(opts.starts, &mut rng) {
        if let Some((r, q)) = problem.descend(start) {
            let value = r.max(0.0).sqrt();
            let polished = problem.polish(&q, tol).unwrap_or(f64::INFINITY);
            if value.min(polished) < best {
                best = value.min(polished);
                argmin = Vector::from_raw(problem.lift(&q)).normalized();
            }
        }
    }
    // the unconstrained minimizer over the hull is the answer whenever it lies in K
    let hull_min = problem
        .subspace_min(k.hull(), argmin.as_deref().unwrap_or(&problem.lift(&vec![1.0; problem.dim()])), tol)
        .unwrap_or(f64::INFINITY);
    let descent = best.min(hull_min);
    let oracle = problem.oracle(opts.oracle_samples, &mut rng);
    RadiusEstimate {
        value: (descent.min(oracle) - RADIUS_SLACK).max(0.0),
        descent,
        oracle,
        argmin,
    }
}

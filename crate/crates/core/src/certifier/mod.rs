//! Stability certificates for closedness of linear images `T(X)`.
//!
//! A map is certified when the kernel of `T` meets the asymptotic cone `K` of `X`
//! only at the origin (class A, with a perturbation radius), or meets the relative
//! interior of `K` while `T` is onto from the hull of `K` (class B). Either way the
//! image stays closed for every nearby map. `Uncertified` carries no claim about
//! closedness.

mod kernel;
mod neighborhood;
mod radius;
mod repair;
mod width;

use serde::{Serialize, Serializer};

use crate::convex::{asymptotic_cone, ConeRep, ConvexSetDescription, RayDirection};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{LinearMap, Subspace, Vector};
use crate::tolerance::Tolerances;

pub use kernel::{kernel_cone_trivial, ri_kernel_nonempty, KernelSearch, RiSearch};
pub use neighborhood::NeighborhoodReport;
pub use radius::{
    stability_radius_a, stability_radius_report, RadiusEstimate, RadiusOptions, RADIUS_SLACK,
};
pub use repair::{PreimageWitness, Repair};
pub use width::{cone_width_delta, DELTA_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UncertifiedReason {
    RankDeficientOnY,
    KernelTouchesBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum Certificate {
    KernelTrivial {
        #[serde(serialize_with = "radius_json")]
        radius: f64,
    },
    RelIntKernel {
        ray: RayDirection,
        delta: f64,
        rank_restriction: usize,
    },
    Uncertified {
        reason: UncertifiedReason,
        witness: Option<Vector>,
    },
}

fn radius_json<S: Serializer>(r: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_finite() {
        s.serialize_f64(*r)
    } else {
        s.serialize_str("inf")
    }
}

/// Certificate class without the quantitative payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CertificateClass {
    KernelTrivial,
    RelIntKernel,
    Uncertified,
}

impl CertificateClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateClass::KernelTrivial => "KernelTrivial",
            CertificateClass::RelIntKernel => "RelIntKernel",
            CertificateClass::Uncertified => "Uncertified",
        }
    }

    pub fn is_certified(self) -> bool {
        self != CertificateClass::Uncertified
    }
}

impl std::fmt::Display for CertificateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Certificate {
    pub fn class(&self) -> CertificateClass {
        match self {
            Certificate::KernelTrivial { .. } => CertificateClass::KernelTrivial,
            Certificate::RelIntKernel { .. } => CertificateClass::RelIntKernel,
            Certificate::Uncertified { .. } => CertificateClass::Uncertified,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.class().is_certified()
    }

    /// Radius for class A, `δ` for class B.
    pub fn radius_or_delta(&self) -> Option<f64> {
        match self {
            Certificate::KernelTrivial { radius } => Some(*radius),
            Certificate::RelIntKernel { delta, .. } => Some(*delta),
            Certificate::Uncertified { .. } => None,
        }
    }
}

/// Rank of `T` restricted to `Y`.
pub fn rank_restriction(t: &LinearMap, y: &Subspace) -> Result<usize> {
    rank_restriction_with(t, y, &Tolerances::default())
}

fn rank_restriction_with(t: &LinearMap, y: &Subspace, tol: &Tolerances) -> Result<usize> {
    Ok(t.restrict_to(y)?.map_or(0, |tq| tq.rank_with_tol(tol.rank)))
}

/// A set together with its asymptotic cone, for certifying many maps against it.
#[derive(Debug, Clone)]
pub struct PreparedSet {
    set: ConvexSetDescription,
    cone: ConeRep,
    tol: Tolerances,
    radius: RadiusOptions,
}

/// Hull data of one map computed once per classification.
struct Restriction {
    m: usize,
    p: usize,
    rank: usize,
    sigma_min: f64,
}

impl PreparedSet {
    pub fn new(set: &ConvexSetDescription) -> Result<Self> {
        Ok(Self {
            cone: asymptotic_cone(set)?,
            set: set.clone(),
            tol: Tolerances::default(),
            radius: RadiusOptions::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_radius_options(mut self, opts: RadiusOptions) -> Self {
        self.radius = opts;
        self
    }

    pub fn set(&self) -> &ConvexSetDescription {
        &self.set
    }

    pub fn cone(&self) -> &ConeRep {
        &self.cone
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn restriction(&self, t: &LinearMap) -> Result<Restriction> {
        check_dim(self.cone.ambient_dim(), t.cols())?;
        let p = self.cone.dim();
        let (rank, sigma_min) = match t.restrict_to(self.cone.hull())? {
            Some(tq) => {
                let svd = tq.svd();
                (svd.rank(self.tol.rank), svd.smallest())
            }
            None => (0, f64::INFINITY),
        };
        Ok(Restriction {
            m: t.rows(),
            p,
            rank,
            sigma_min,
        })
    }

    fn rank_deficient() -> Certificate {
        Certificate::Uncertified {
            reason: UncertifiedReason::RankDeficientOnY,
            witness: None,
        }
    }

    /// Certificate class only: radius and width are not computed.
    pub fn verdict(&self, t: &LinearMap) -> Result<CertificateClass> {
        let r = self.restriction(t)?;
        if r.rank < r.m.min(r.p) {
            return Ok(CertificateClass::Uncertified);
        }
        if r.p <= r.m || kernel::kernel_cone_trivial_with(t, &self.cone, &self.tol)?.trivial {
            return Ok(CertificateClass::KernelTrivial);
        }
        if kernel::ri_kernel_nonempty_with(t, &self.cone, &self.tol)?.nonempty {
            return Ok(CertificateClass::RelIntKernel);
        }
        Ok(CertificateClass::Uncertified)
    }

    pub fn classify(&self, t: &LinearMap) -> Result<Certificate> {
        let r = self.restriction(t)?;
        if r.rank < r.m.min(r.p) {
            return Ok(Self::rank_deficient());
        }
        let boundary = |witness| Certificate::Uncertified {
            reason: UncertifiedReason::KernelTouchesBoundary,
            witness,
        };
        // the class-A radius also keeps the rank maximal on the hull
        let kernel_trivial = |dist: f64| {
            let radius = (dist.min(r.sigma_min) - RADIUS_SLACK).max(0.0);
            if radius > 0.0 {
                Certificate::KernelTrivial { radius }
            } else {
                boundary(None)
            }
        };
        if r.p <= r.m {
            // T is one-to-one on the hull
            return Ok(kernel_trivial(f64::INFINITY));
        }
        let search = kernel::kernel_cone_trivial_with(t, &self.cone, &self.tol)?;
        if search.trivial {
            let est = radius::estimate_unchecked(t, &self.cone, &self.radius, &self.tol);
            return Ok(kernel_trivial(est.value + RADIUS_SLACK));
        }
        let ri = kernel::ri_kernel_nonempty_with(t, &self.cone, &self.tol)?;
        if let Some(ray) = ri.ray {
            match width::cone_width_delta_with(&self.cone, &ray, &self.tol) {
                Ok(delta) => {
                    return Ok(Certificate::RelIntKernel {
                        ray,
                        delta,
                        rank_restriction: r.rank,
                    })
                }
                Err(Error::RayNotInterior) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(boundary(search.witness))
    }

    pub fn stability_radius(&self, t: &LinearMap) -> Result<RadiusEstimate> {
        stability_radius_report(t, &self.cone, &self.radius, &self.tol)
    }

    pub fn preimage_witness(&self, t: &LinearMap, y: &[f64], margin: f64) -> Result<PreimageWitness> {
        let cert = self.classify(t)?;
        self.preimage_with(t, &cert, y, margin)
    }

    /// Preimage from an already computed class-B certificate.
    pub fn preimage_with(
        &self,
        t: &LinearMap,
        cert: &Certificate,
        y: &[f64],
        margin: f64,
    ) -> Result<PreimageWitness> {
        repair::preimage(self, t, cert, y, margin)
    }

    pub fn repair(&self, t: &LinearMap, eps: f64) -> Result<Repair> {
        repair::repair(self, t, eps)
    }

    pub fn neighborhood_check(
        &self,
        t: &LinearMap,
        r: f64,
        samples: usize,
        seed: u64,
    ) -> Result<NeighborhoodReport> {
        neighborhood::check(self, t, r, samples, seed)
    }
}

pub fn classify(t: &LinearMap, x: &ConvexSetDescription) -> Result<Certificate> {
    PreparedSet::new(x)?.classify(t)
}

pub fn verdict(t: &LinearMap, x: &ConvexSetDescription) -> Result<CertificateClass> {
    PreparedSet::new(x)?.verdict(t)
}

pub fn preimage_witness(
    t: &LinearMap,
    x: &ConvexSetDescription,
    y: &[f64],
    margin: f64,
) -> Result<PreimageWitness> {
    PreparedSet::new(x)?.preimage_witness(t, y, margin)
}

pub fn repair(t: &LinearMap, x: &ConvexSetDescription, eps: f64) -> Result<Repair> {
    PreparedSet::new(x)?.repair(t, eps)
}

pub fn neighborhood_check(
    t: &LinearMap,
    x: &ConvexSetDescription,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<NeighborhoodReport> {
    PreparedSet::new(x)?.neighborhood_check(t, r, samples, seed)
}

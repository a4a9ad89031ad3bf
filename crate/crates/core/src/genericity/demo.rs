use serde::Serialize;

use crate::certifier::{Certificate, PreimageWitness, PreparedSet, Repair};
use crate::convex::ConvexSetDescription;
use crate::error::{Error, Result};
use crate::linalg::{LinearMap, Vector};

/// A sequence in `X` whose images converge to a point outside `T(X)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSequence {
    pub ks: Vec<usize>,
    pub points: Vec<Vector>,
    pub images: Vec<Vector>,
    pub limit: Vector,
    /// `|T(w_K) - limit|`.
    pub final_gap: f64,
    pub all_in_set: bool,
    pub not_in_image: bool,
}

/// `T(x) = (y, z)` on `R^3`.
pub fn yz_projection() -> LinearMap {
    LinearMap::coordinate_projection(3, &[1, 2])
}

/// Closed form of the image of the rotated cone under [`yz_projection`]:
/// `{ z > 0 } ∪ { (0, 0) }`.
pub fn rsoc_yz_image_contains(y: f64, z: f64) -> bool {
    z > 0.0 || (y == 0.0 && z == 0.0)
}

/// `w_k = (k, 1, 1/k)` in the rotated cone, with images `(1, 1/k) -> (1, 0)`.
pub fn witness_nonclosed_demo(k_max: usize) -> Result<WitnessSequence> {
    if k_max < 3 {
        return Err(Error::InvalidInput("demo needs K >= 3".into()));
    }
    let x = ConvexSetDescription::rsoc(3)?;
    let t = yz_projection();
    let ks: Vec<usize> = (1..=k_max).collect();
    let points: Vec<Vector> = ks
        .iter()
        .map(|&k| Vector::new(vec![k as f64, 1.0, 1.0 / k as f64]))
        .collect::<Result<_>>()?;
    let images: Vec<Vector> = points.iter().map(|w| t.apply(w)).collect();
    let limit = Vector::new(vec![1.0, 0.0])?;
    let final_gap = images.last().expect("k_max >= 3").sub(&limit).norm();
    Ok(WitnessSequence {
        all_in_set: points.iter().all(|w| x.contains(w, 1e-12)),
        not_in_image: !rsoc_yz_image_contains(limit[0], limit[1]),
        ks,
        points,
        images,
        limit,
        final_gap,
    })
}

/// The demo sequence together with the certifier's view of the same pair and of its
/// repair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub sequence: WitnessSequence,
    pub certificate: Certificate,
    pub repair_eps: f64,
    pub repair: Repair,
    pub repaired_certificate: Certificate,
    /// Preimage of the limit point under the repaired map.
    pub repaired_preimage: PreimageWitness,
}

pub fn nonclosed_demo_report(k_max: usize, eps: f64) -> Result<DemoReport> {
    let sequence = witness_nonclosed_demo(k_max)?;
    let prepared = PreparedSet::new(&ConvexSetDescription::rsoc(3)?)?;
    let t = yz_projection();
    let certificate = prepared.classify(&t)?;
    let repair = prepared.repair(&t, eps)?;
    let repaired_certificate = prepared.classify(&repair.map)?;
    let repaired_preimage = prepared.preimage_with(&repair.map, &repaired_certificate, &sequence.limit, 0.01)?;
    Ok(DemoReport {
        sequence,
        certificate,
        repair_eps: eps,
        repair,
        repaired_certificate,
        repaired_preimage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{CertificateClass, UncertifiedReason};

    #[test]
    fn three_term_sequence() {
        let s = witness_nonclosed_demo(3).unwrap();
        let expect = [[1.0, 1.0], [1.0, 0.5], [1.0, 1.0 / 3.0]];
        for (img, e) in s.images.iter().zip(expect) {
            assert!((img[0] - e[0]).abs() < 1e-15 && (img[1] - e[1]).abs() < 1e-15);
        }
        assert!(s.all_in_set && s.not_in_image);
        assert!(witness_nonclosed_demo(2).is_err());
    }

    #[test]
    fn image_closed_form() {
        assert!(rsoc_yz_image_contains(5.0, 0.1));
        assert!(rsoc_yz_image_contains(0.0, 0.0));
        assert!(!rsoc_yz_image_contains(1.0, 0.0));
        assert!(!rsoc_yz_image_contains(0.0, -1.0));
    }

    #[test]
    fn demo_report_is_consistent() {
        let r = nonclosed_demo_report(10, 0.01).unwrap();
        assert!(matches!(
            r.certificate,
            Certificate::Uncertified { reason: UncertifiedReason::KernelTouchesBoundary, .. }
        ));
        assert_eq!(r.repaired_certificate.class(), CertificateClass::RelIntKernel);
        let img = r.repair.map.apply(&r.repaired_preimage.w);
        assert!((img[0] - 1.0).abs() < 1e-8 && img[1].abs() < 1e-8);
    }
}

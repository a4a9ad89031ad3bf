use closed_image::certifier::{CertificateClass, RadiusOptions};
use closed_image::convex::{ConeRep, ConvexSetDescription};
use closed_image::genericity::{
    nonclosed_demo_report, random_map, rsoc_yz_image_contains, survey, witness_nonclosed_demo,
    yz_projection, SurveyConfig,
};
use closed_image::linalg::{norm, LinearMap};
use closed_image::Error;

fn quick(m: usize, samples: usize, seed: u64) -> SurveyConfig {
    let mut c = SurveyConfig::new(m, samples, seed);
    c.radius = RadiusOptions {
        starts: 16,
        oracle_samples: 500,
    };
    c
}

/// Kernel direction of a 2 x 3 map.
fn cross(t: &LinearMap) -> [f64; 3] {
    let (a, b) = (t.row(0), t.row(1));
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Class of a generic 2 x 3 map against the second-order cone, from its kernel line.
fn soc_class(t: &LinearMap) -> CertificateClass {
    let d = cross(t);
    if d[2].abs() > (d[0] * d[0] + d[1] * d[1]).sqrt() {
        CertificateClass::RelIntKernel
    } else {
        CertificateClass::KernelTrivial
    }
}

#[test]
fn random_maps_are_reproducible() {
    assert_eq!(random_map(2, 3, 1, 5), random_map(2, 3, 1, 5));
    assert_ne!(random_map(2, 3, 1, 5), random_map(2, 3, 1, 6));
    assert_ne!(random_map(2, 3, 1, 5), random_map(2, 3, 2, 5));
}

#[test]
fn single_sample_golden() {
    let soc = ConvexSetDescription::soc(3).unwrap();
    for seed in [0u64, 1, 2024] {
        let report = survey(&soc, &quick(2, 1, seed)).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.sample_index, 0);
        assert_eq!(row.certificate_class, soc_class(&random_map(2, 3, seed, 0)));
        assert_eq!(report.rechecked_maps, usize::from(row.recheck_pass.is_some()));
    }
    let report = survey(&soc, &quick(2, 1, 2024)).unwrap();
    let csv = report.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "sample_index,certificate_class,radius_or_delta,recheck_pass");
    assert!(lines.next().unwrap().starts_with("0,"));
}

#[test]
fn class_frequencies_match_kernel_geometry() {
    // a Gaussian 2 x 3 kernel is a uniform line; it enters the cone with probability 1 - 1/sqrt 2
    let soc = ConvexSetDescription::soc(3).unwrap();
    let n = 2000;
    let mut config = quick(2, n, 77);
    config.recheck_count = 0;
    let report = survey(&soc, &config).unwrap();
    let p = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    assert!((report.fractions.rel_int_kernel - p).abs() < 3.0 * sigma, "{:?}", report.fractions);
    assert_eq!(report.fractions.uncertified, 0.0);
    let agree = report
        .rows
        .iter()
        .filter(|r| r.certificate_class == soc_class(&random_map(2, 3, 77, r.sample_index as u64)))
        .count();
    assert!(agree as f64 >= 0.999 * n as f64);
    // exchangeability: both halves estimate the same frequency
    let half = n / 2;
    let freq = |rows: &[closed_image::genericity::SurveyRow]| {
        rows.iter().filter(|r| r.certificate_class == CertificateClass::RelIntKernel).count() as f64 / rows.len() as f64
    };
    let (a, b) = (freq(&report.rows[..half]), freq(&report.rows[half..]));
    let s2 = (2.0 * p * (1.0 - p) / half as f64).sqrt();
    assert!((a - b).abs() < 3.0 * s2, "{a} vs {b}");
}

#[test]
fn orthant_survey_is_almost_surely_certified() {
    let orthant = ConvexSetDescription::cone(ConeRep::orthant(3));
    for m in 1..=3 {
        let report = survey(&orthant, &quick(m, 200, 5)).unwrap();
        assert_eq!(report.fractions.uncertified, 0.0, "m = {m}");
        assert_eq!(report.rank_deficient_fraction, 0.0);
        let sum = report.fractions.kernel_trivial + report.fractions.rel_int_kernel;
        assert!((sum - 1.0).abs() < 1e-12);
        if let Some(rate) = report.persistence_rate {
            assert!(rate > 0.95, "m = {m}: {rate}");
        }
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let soc = ConvexSetDescription::rsoc(3).unwrap();
    let config = {
        let mut c = quick(1, 40, 9);
        c.recheck_count = 10;
        c.recheck_perturbations = 5;
        c
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| survey(&soc, &config).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    assert_eq!(a.fractions, b.fractions);
    assert_eq!(a.persistence_rate, b.persistence_rate);
}

#[test]
fn survey_input_errors() {
    let soc = ConvexSetDescription::soc(3).unwrap();
    assert!(matches!(survey(&soc, &quick(2, 0, 0)), Err(Error::InvalidInput(_))));
    assert!(matches!(survey(&soc, &quick(4, 10, 0)), Err(Error::ScaleExceeded(_))));
    assert!(matches!(survey(&ConvexSetDescription::soc(9).unwrap(), &quick(2, 10, 0)), Err(Error::ScaleExceeded(_))));
}

#[test]
fn nonclosed_witness_sequence() {
    let s = witness_nonclosed_demo(12).unwrap();
    assert!(s.all_in_set && s.not_in_image);
    assert_eq!(s.points.len(), s.images.len());
    assert!(!rsoc_yz_image_contains(s.limit[0], s.limit[1]));
    let t = yz_projection();
    let gaps: Vec<f64> = s.images.iter().map(|y| norm(&y.sub(&s.limit))).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert!((gaps.last().unwrap() - s.final_gap).abs() < 1e-12);
    for (x, y) in s.points.iter().zip(&s.images) {
        assert!(t.apply(x).sub(y).norm() < 1e-12);
        assert!(rsoc_yz_image_contains(y[0], y[1]));
    }
}

#[test]
fn image_membership_examples() {
    // T(RSOC) under (x, y, z) -> (y, z) is { z > 0 } together with the origin
    assert!(rsoc_yz_image_contains(0.0, 0.0));
    assert!(rsoc_yz_image_contains(5.0, 0.1));
    assert!(rsoc_yz_image_contains(-5.0, 1e-6));
    assert!(!rsoc_yz_image_contains(1.0, 0.0));
    assert!(!rsoc_yz_image_contains(0.0, -1.0));
}

#[test]
fn demo_report_repairs_the_map() {
    let r = nonclosed_demo_report(8, 0.01).unwrap();
    assert_eq!(r.certificate.class(), CertificateClass::Uncertified);
    assert_eq!(r.repaired_certificate.class(), CertificateClass::RelIntKernel);
    assert!(r.repair.perturbation <= r.repair.bound + 1e-9);
    assert!(r.repair.perturbation < 0.05);
    let w = &r.repaired_preimage.w;
    assert!(w[0] >= 0.0 && w[2] >= 0.0 && w[0] * w[2] >= w[1] * w[1] - 1e-9);
}

use closed_image::convex::{
    asymptotic_cone, dd_convert, parse_set, set_to_json, AnalyticCone, ConeRep, ConvexSetDescription,
};
use closed_image::rng::{gaussian_vec, stream};
use closed_image::{Error, Vector};
use proptest::prelude::*;
use rand::Rng;

fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

/// Random pointed cone: generators with a positive last coordinate.
fn random_pointed(n: usize, count: usize, seed: u64) -> ConeRep {
    let mut rng = stream(seed, 0);
    let gens = (0..count)
        .map(|_| {
            let mut g = gaussian_vec(&mut rng, n);
            g[n - 1] = g[n - 1].abs() + 0.5;
            Vector::new(g).unwrap()
        })
        .collect();
    ConeRep::finitely_generated(n, gens).unwrap()
}

fn random_conic_combination(k: &ConeRep, seed: u64) -> Vector {
    let mut rng = stream(seed, 7);
    let mut x = Vector::zeros(k.ambient_dim());
    for g in k.generators() {
        x = x.axpy(rng.random::<f64>() * 3.0, g);
    }
    x
}

#[test]
fn dd_round_trip_mutual_containment() {
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 3);
        let k = random_pointed(n, 3 + seed as usize % 4, seed);
        let h = dd_convert(&k).unwrap();
        assert!(h.facets().is_some());
        for g in h.generators() {
            assert!(k.contains(g, 1e-8), "seed {seed}: converted generator not in source");
        }
        for g in k.generators() {
            assert!(h.contains(g, 1e-8), "seed {seed}: source generator not in converted");
        }
    }
}

#[test]
fn dd_recovers_square_cone() {
    let k = ConeRep::finitely_generated(
        3,
        vec![v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, 1.0]), v(&[-1.0, 0.0, 1.0]), v(&[0.0, -1.0, 1.0]), v(&[0.0, 0.0, 1.0])],
    )
    .unwrap();
    let h = dd_convert(&k).unwrap();
    assert_eq!(h.facets().unwrap().len(), 4);
    assert!(!h.contains(&[1.0, 1.0, 1.0], 1e-9));
    assert!(h.contains(&[0.5, 0.5, 1.0], 1e-9));
}

#[test]
fn orthant_and_subspace_cones() {
    let k = ConeRep::orthant(3);
    assert_eq!(k.dim(), 3);
    assert!(k.contains(&[1.0, 0.0, 2.0], 1e-12));
    assert!(!k.contains(&[1.0, -0.1, 2.0], 1e-12));
    assert!(k.ri_contains(&[1.0, 1.0, 2.0], 1e-12));
    assert!(!k.ri_contains(&[1.0, 0.0, 2.0], 1e-12));
    let line = ConeRep::finitely_generated(2, vec![v(&[1.0, 1.0]), v(&[-1.0, -1.0])])
        .unwrap()
        .with_facets()
        .unwrap();
    assert!(line.is_subspace());
    assert!(line.ri_contains(&[-3.0, -3.0], 1e-12));
    assert!(ConeRep::zero(4).is_zero());
}

#[test]
fn asymptotic_cones_of_supported_sets() {
    let square = ConvexSetDescription::polyhedron(
        vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])],
        vec![],
    )
    .unwrap();
    assert!(asymptotic_cone(&square).unwrap().is_zero());
    let strip = ConvexSetDescription::polyhedron(vec![v(&[0.0, 0.0]), v(&[0.0, 1.0])], vec![v(&[1.0, 0.0])]).unwrap();
    let k = asymptotic_cone(&strip).unwrap();
    assert_eq!(k.dim(), 1);
    assert!(k.contains(&[5.0, 0.0], 1e-12));
    assert!(!k.contains(&[-5.0, 0.0], 1e-12));
    let soc = ConvexSetDescription::soc(3).unwrap();
    assert_eq!(asymptotic_cone(&soc).unwrap().analytic_tag(), Some(AnalyticCone::SecondOrder));
    assert!(matches!(ConvexSetDescription::soc(0), Err(_)));
}

#[test]
fn analytic_membership() {
    let s = AnalyticCone::SecondOrder;
    assert!(s.contains(&[3.0, 4.0, 5.0], 1e-12));
    assert!(!s.contains(&[3.0, 4.0, 4.9], 1e-12));
    assert!(!s.ri_contains(&[3.0, 4.0, 5.0], 1e-9));
    let r = AnalyticCone::RotatedSecondOrder;
    // x z >= y^2
    assert!(r.contains(&[1.0, 1.0, 1.0], 1e-12));
    assert!(r.contains(&[2.0, 2.0, 2.0], 1e-12));
    assert!(!r.contains(&[1.0, 1.5, 1.0], 1e-12));
    assert!(!r.contains(&[-1.0, 0.0, -1.0], 1e-12));
    for p in [[1.0, 0.3, 2.0], [0.2, -1.0, 3.0], [-1.0, 2.0, 0.5]] {
        let back = r.from_standard(&r.to_standard(&p));
        for (a, b) in back.iter().zip(p) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(r.contains(&p, 1e-12), s.contains(&r.to_standard(&p), 1e-12));
    }
}

#[test]
fn schema_round_trip() {
    let text = r#"{"type":"translate","base":{"type":"soc","dim":3},"offset":[1,2,3]}"#;
    let x = parse_set(text).unwrap();
    assert_eq!(x.ambient_dim(), 3);
    let again = parse_set(&set_to_json(&x)).unwrap();
    assert_eq!(set_to_json(&again), set_to_json(&x));
    assert!(matches!(parse_set(r#"{"type":"cylinder"}"#), Err(Error::InvalidInput(_))));
    assert!(parse_set(r#"{"type":"soc","dim":3,"extra":1}"#).is_err());
}

proptest! {
    #[test]
    fn conic_combinations_stay_in_cone(seed in any::<u64>(), n in 2usize..5, count in 1usize..6) {
        let k = random_pointed(n, count, seed);
        let x = random_conic_combination(&k, seed);
        prop_assert!(k.contains(&x, 1e-8 * x.norm().max(1.0)));
        let h = dd_convert(&k).unwrap();
        prop_assert!(h.contains(&x, 1e-8 * x.norm().max(1.0)));
    }

    #[test]
    fn asymptotic_cone_is_idempotent(seed in any::<u64>(), n in 2usize..5, count in 1usize..5) {
        let k = random_pointed(n, count, seed);
        let once = asymptotic_cone(&ConvexSetDescription::cone(k.clone())).unwrap();
        let twice = asymptotic_cone(&ConvexSetDescription::cone(once.clone())).unwrap();
        prop_assert_eq!(once.dim(), twice.dim());
        for g in once.generators() {
            prop_assert!(twice.contains(g, 1e-8));
        }
        for g in twice.generators() {
            prop_assert!(once.contains(g, 1e-8));
        }
    }

    #[test]
    fn translation_invariance(seed in any::<u64>(), off in prop::collection::vec(-10.0f64..10.0, 3)) {
        let k = random_pointed(3, 4, seed);
        let base = ConvexSetDescription::polyhedron_in(3, vec![Vector::zeros(3)], k.generators().to_vec()).unwrap();
        let moved = ConvexSetDescription::translate(base.clone(), Vector::new(off.clone()).unwrap()).unwrap();
        let a = asymptotic_cone(&base).unwrap();
        let b = asymptotic_cone(&moved).unwrap();
        prop_assert_eq!(a.dim(), b.dim());
        for g in a.generators() {
            prop_assert!(b.contains(g, 1e-8));
        }
        let x = random_conic_combination(&k, seed);
        let shifted: Vec<f64> = x.iter().zip(&off).map(|(a, b)| a + b).collect();
        prop_assert!(moved.contains(&shifted, 1e-7));
    }

    #[test]
    fn soc_is_closed_under_addition(a in prop::collection::vec(-3.0f64..3.0, 3), b in prop::collection::vec(-3.0f64..3.0, 3)) {
        let s = AnalyticCone::SecondOrder;
        let lift = |x: &[f64]| { let mut y = x.to_vec(); y[2] = (x[0] * x[0] + x[1] * x[1]).sqrt() + x[2].abs(); y };
        let (a, b) = (lift(&a), lift(&b));
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        prop_assert!(s.contains(&sum, 1e-12));
    }
}

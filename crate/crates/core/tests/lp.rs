use closed_image::lp::{lp_solve, LpOutcome, LpProblem};
use closed_image::rng::stream;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn worked_examples() {
    let p = LpProblem::nonnegative(vec![1.0, 0.0], vec![vec![1.0, 1.0]], vec![1.0]).unwrap();
    match lp_solve(&p).unwrap() {
        LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    let p = LpProblem::nonnegative(vec![0.0], vec![vec![1.0]], vec![-1.0]).unwrap();
    assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Infeasible);
    let p = LpProblem::nonnegative(vec![1.0], vec![], vec![]).unwrap();
    assert_eq!(lp_solve(&p).unwrap(), LpOutcome::Unbounded);
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Maximum of `c x` over `{ A x = b, x >= 0 }` by enumerating basic solutions.
fn brute_force(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let (m, n) = (a.len(), c.len());
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let sub: Vec<Vec<f64>> = a.iter().map(|row| cols.iter().map(|&j| row[j]).collect()).collect();
        let Some(xb) = solve_square(sub, b.to_vec()) else { continue };
        if xb.iter().any(|&x| x < -1e-9) {
            continue;
        }
        let val: f64 = cols.iter().zip(&xb).map(|(&j, x)| c[j] * x).sum();
        best = Some(best.map_or(val, |b: f64| b.max(val)));
    }
    best
}

#[test]
fn matches_vertex_enumeration() {
    let mut rng = stream(42, 0);
    let mut compared = 0;
    for _ in 0..300 {
        let n = rng.random_range(2..=7);
        let m = rng.random_range(1..n.min(4));
        // a bounding row keeps every instance bounded; the slack is the last variable
        let mut a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        for row in &mut a {
            row.push(0.0);
        }
        let mut bound = vec![1.0; n];
        bound.push(1.0);
        a.push(bound);
        let x0: Vec<f64> = (0..=n).map(|_| rng.random::<f64>()).collect();
        let scale: f64 = x0.iter().sum();
        let x0: Vec<f64> = x0.iter().map(|x| 5.0 * x / scale).collect();
        let b: Vec<f64> = a.iter().map(|row| row.iter().zip(&x0).map(|(r, x)| r * x).sum()).collect();
        let mut c: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        c.push(0.0);
        let p = LpProblem::nonnegative(c.clone(), a.clone(), b.clone()).unwrap();
        let Some(expect) = brute_force(&c, &a, &b) else { continue };
        match lp_solve(&p).unwrap() {
            LpOutcome::Optimal { value, solution } => {
                assert!((value - expect).abs() <= 1e-8 * expect.abs().max(1.0), "{value} vs {expect}");
                assert!(p.violation(&solution) <= 1e-9);
                compared += 1;
            }
            other => panic!("feasible bounded instance reported {other:?}"),
        }
    }
    assert!(compared > 250);
}

proptest! {
    #[test]
    fn optimal_solutions_are_feasible(
        rows in prop::collection::vec(prop::collection::vec(-4.0f64..4.0, 5), 1..4),
        x0 in prop::collection::vec(0.0f64..2.0, 5),
        c in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let b: Vec<f64> = rows.iter().map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect();
        let p = LpProblem::nonnegative(c.clone(), rows, b).unwrap();
        match lp_solve(&p).unwrap() {
            LpOutcome::Optimal { solution, value } => {
                prop_assert!(p.violation(&solution) <= 1e-9);
                let at_x0: f64 = c.iter().zip(&x0).map(|(a, x)| a * x).sum();
                prop_assert!(value >= at_x0 - 1e-8);
            }
            LpOutcome::Unbounded => {}
            LpOutcome::Infeasible => prop_assert!(false, "x0 is feasible"),
        }
    }
}

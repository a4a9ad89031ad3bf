//! Double description: extreme rays and lineality of `{x : <c_i, x> >= 0}`.
//!
//! Constraints are added one at a time. While the current cone still has a
//! lineality space the new constraint cuts it down by one dimension; afterwards the
//! classical split into positive, zero and negative rays applies, combining only
//! adjacent pairs (combinatorial adjacency test on tight-constraint sets). Values
//! within the snapping threshold are treated as exact zeros.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Guard against combinatorial blow-up in intermediate representations.
const MAX_INTERMEDIATE_RAYS: usize = 200_000;

#[derive(Debug, Clone)]
pub(crate) struct DdResult {
    pub rays: Vec<Vec<f64>>,
    pub lineality: Vec<Vec<f64>>,
}

#[derive(Clone)]
struct Ray {
    v: Vec<f64>,
    zero: Bits,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    fn full_upto(len: usize, k: usize) -> Self {
        let mut b = Self::empty(len);
        for i in 0..k {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn unit(v: Vec<f64>, snap: f64) -> Option<Vec<f64>> {
    let n = norm(&v);
    if n <= snap {
        return None;
    }
    Some(
        v.into_iter()
            .map(|x| {
                let y = x / n;
                if y.abs() < snap {
                    0.0
                } else {
                    y
                }
            })
            .collect(),
    )
}

fn snap_value(x: f64, snap: f64) -> f64 {
    if x.abs() < snap {
        0.0
    } else {
        x
    }
}

pub(crate) fn extreme_rays(dim: usize, constraints: &[Vec<f64>], snap: f64) -> Result<DdResult> {
    let constraints: Vec<Vec<f64>> = constraints
        .iter()
        .filter_map(|c| unit(c.clone(), snap))
        .collect();
    let total = constraints.len();

    let mut lineality: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, c) in constraints.iter().enumerate() {
        let pick = lineality
            .iter()
            .enumerate()
            .map(|(i, l)| (i, dot(c, l)))
            .filter(|(_, s)| s.abs() > snap)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
        if let Some((i0, s0)) = pick {
            let l0_raw = lineality.swap_remove(i0);
            let l0: Vec<f64> = if s0 < 0.0 { l0_raw.iter().map(|x| -x).collect() } else { l0_raw };
            let s0 = s0.abs();
            let reduce = |v: &[f64]| -> Vec<f64> {
                let f = dot(c, v) / s0;
                v.iter().zip(&l0).map(|(a, b)| a - f * b).collect()
            };
            lineality = lineality
                .iter()
                .filter_map(|l| unit(reduce(l), snap))
                .collect();
            for r in rays.iter_mut() {
                r.v = unit(reduce(&r.v), snap).unwrap_or_else(|| r.v.clone());
                r.zero.set(k);
            }
            rays.push(Ray {
                v: l0,
                zero: Bits::full_upto(total, k),
            });
            continue;
        }

        let vals: Vec<f64> = rays.iter().map(|r| snap_value(dot(c, &r.v), snap)).collect();
        let lin_dim = lineality.len();
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (r, &s) in rays.iter().zip(&vals) {
            if s > 0.0 {
                next.push(r.clone());
            } else if s == 0.0 {
                let mut r = r.clone();
                r.zero.set(k);
                next.push(r);
            }
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0.0).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0.0).collect();
        // two extreme rays of a cone with lineality dim l in R^d are adjacent only if
        // they share at least d - l - 2 tight constraints
        let min_common = dim.saturating_sub(lin_dim + 2);
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero.and(&rays[q].zero);
                if common.count() < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(r, ray)| r == p || r == q || !common.is_subset_of(&ray.zero));
                if !adjacent {
                    continue;
                }
                let (sp, sq) = (vals[p], vals[q]);
                let w: Vec<f64> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(b, a)| sp * b - sq * a)
                    .collect();
                if let Some(w) = unit(w, snap) {
                    let mut zero = common;
                    zero.set(k);
                    next.push(Ray { v: w, zero });
                }
            }
        }
        if next.len() > MAX_INTERMEDIATE_RAYS {
            return Err(Error::ScaleExceeded(format!(
                "double description produced more than {MAX_INTERMEDIATE_RAYS} rays"
            )));
        }
        rays = next;
    }

    Ok(DdResult {
        rays: rays.into_iter().map(|r| r.v).collect(),
        lineality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_rays() {
        let res = extreme_rays(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 1e-10)
            .unwrap();
        assert!(res.lineality.is_empty());
        assert_eq!(res.rays.len(), 3);
    }

    #[test]
    fn halfspace_keeps_lineality() {
        let res = extreme_rays(3, &[vec![0.0, 0.0, 2.0]], 1e-10).unwrap();
        assert_eq!(res.lineality.len(), 2);
        assert_eq!(res.rays, vec![vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn square_pyramid_has_four_rays() {
        // cone over a square: |x| <= z, |y| <= z
        let cons = vec![
            vec![1.0, 0.0, 1.0],
            vec![-1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![0.0, -1.0, 1.0],
        ];
        let res = extreme_rays(3, &cons, 1e-10).unwrap();
        assert!(res.lineality.is_empty());
        assert_eq!(res.rays.len(), 4);
        for r in &res.rays {
            for c in &cons {
                assert!(dot(c, r) > -1e-12);
            }
        }
    }

    #[test]
    fn contradictory_constraints_give_zero_cone() {
        let res = extreme_rays(1, &[vec![1.0], vec![-1.0]], 1e-10).unwrap();
        assert!(res.rays.is_empty() && res.lineality.is_empty());
    }
}

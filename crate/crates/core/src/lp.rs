//! Small dense linear programming.
//!
//! Problems have the form `maximize c·x  s.t.  A x = b,  x_j >= l_j` where each
//! lower bound may be absent (free variable). They are rewritten into standard form
//! and solved by a two-phase tableau simplex with Bland's anti-cycling rule, so the
//! result is a deterministic function of the input.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, Vector};

pub const MAX_VARIABLES: usize = 512;
pub const MAX_CONSTRAINTS: usize = 512;
const MAX_PIVOTS: usize = 200_000;
const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    eq_rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    lower: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { solution: Vector, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        eq_rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
        lower: Vec<Option<f64>>,
    ) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return Err(Error::InvalidInput("LP needs at least one variable".into()));
        }
        check_dim(n, lower.len())?;
        check_dim(eq_rows.len(), rhs.len())?;
        for r in &eq_rows {
            check_dim(n, r.len())?;
        }
        let finite = objective.iter().chain(rhs.iter()).chain(eq_rows.iter().flatten()).all(|x| x.is_finite())
            && lower.iter().flatten().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidInput("LP data must be finite".into()));
        }
        Ok(Self {
            objective,
            eq_rows,
            rhs,
            lower,
        })
    }

    /// All variables nonnegative.
    pub fn nonnegative(objective: Vec<f64>, eq_rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = objective.len();
        Self::new(objective, eq_rows, rhs, vec![Some(0.0); n])
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rows.len()
    }

    /// Largest absolute violation of the equality constraints and bounds at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let eq = self
            .eq_rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| (dot(r, x) - b).abs());
        let bounds = self
            .lower
            .iter()
            .zip(x)
            .filter_map(|(l, xi)| l.map(|l| (l - xi).max(0.0)));
        eq.chain(bounds).fold(0.0, f64::max)
    }
}

/// A column of the standard-form problem and where it came from.
#[derive(Clone, Copy)]
enum Column {
    Shifted(usize),
    Positive(usize),
    Negative(usize),
}

struct Tableau {
    /// `rows x (cols + 1)`, last entry of each row is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::Numerical("simplex pivot limit reached".into()));
        }
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f == 0.0 {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Maximizes `cost · y` over the current feasible basis; `allowed` masks
    /// entering columns. Returns `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<bool> {
        loop {
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| cost[b] * self.t[i][j])
                        .sum::<f64>();
                reduced > COST_TOL
            });
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }
}

/// Solves with the default feasibility tolerance `1e-9`.
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    lp_solve_with_tol(p, 1e-9)
}

pub fn lp_solve_with_tol(p: &LpProblem, feas_tol: f64) -> Result<LpOutcome> {
    let n = p.num_variables();
    let m = p.num_constraints();
    if n > MAX_VARIABLES || m > MAX_CONSTRAINTS {
        return Err(Error::ScaleExceeded(format!(
            "LP with {n} variables and {m} constraints (limits {MAX_VARIABLES}/{MAX_CONSTRAINTS})"
        )));
    }

    let mut columns = Vec::new();
    for (j, l) in p.lower.iter().enumerate() {
        match l {
            Some(_) => columns.push(Column::Shifted(j)),
            None => {
                columns.push(Column::Positive(j));
                columns.push(Column::Negative(j));
            }
        }
    }
    let ns = columns.len();
    let cols = ns + m;

    let mut t = Vec::with_capacity(m);
    for (i, (row, b)) in p.eq_rows.iter().zip(&p.rhs).enumerate() {
        let mut shifted_b = *b;
        for (j, l) in p.lower.iter().enumerate() {
            if let Some(l) = l {
                shifted_b -= row[j] * l;
            }
        }
        let sign = if shifted_b < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; cols + 1];
        for (k, col) in columns.iter().enumerate() {
            r[k] = sign
                * match *col {
                    Column::Shifted(j) | Column::Positive(j) => row[j],
                    Column::Negative(j) => -row[j],
                };
        }
        r[ns + i] = 1.0;
        r[cols] = sign * shifted_b;
        t.push(r);
    }
    let rhs_scale = 1.0 + t.iter().map(|r| r[cols].abs()).fold(0.0, f64::max);
    let mut tab = Tableau {
        t,
        basis: (ns..cols).collect(),
        cols,
        pivots: 0,
    };

    // phase 1: maximize -sum(artificials)
    let mut phase1_cost = vec![0.0; cols];
    for c in phase1_cost.iter_mut().skip(ns) {
        *c = -1.0;
    }
    let all = vec![true; cols];
    tab.optimize(&phase1_cost, &all)?;
    let infeasibility: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= ns)
        .map(|(i, _)| tab.rhs(i).abs())
        .sum();
    if infeasibility > feas_tol * rhs_scale {
        return Ok(LpOutcome::Infeasible);
    }

    // drive remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= ns {
            let pick = (0..ns)
                .filter(|j| !tab.basis.contains(j))
                .max_by(|&a, &b| tab.t[i][a].abs().total_cmp(&tab.t[i][b].abs()))
                .filter(|&j| tab.t[i][j].abs() > 1e-9);
            match pick {
                Some(j) => tab.pivot(i, j)?,
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = vec![0.0; cols];
    for (k, col) in columns.iter().enumerate() {
        cost[k] = match *col {
            Column::Shifted(j) | Column::Positive(j) => p.objective[j],
            Column::Negative(j) => -p.objective[j],
        };
    }
    let mut allowed = vec![true; cols];
    for a in allowed.iter_mut().skip(ns) {
        *a = false;
    }
    if !tab.optimize(&cost, &allowed)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![0.0; ns];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < ns {
            y[b] = tab.rhs(i);
        }
    }
    let mut x: Vec<f64> = p.lower.iter().map(|l| l.unwrap_or(0.0)).collect();
    for (k, col) in columns.iter().enumerate() {
        match *col {
            Column::Shifted(j) | Column::Positive(j) => x[j] += y[k],
            Column::Negative(j) => x[j] -= y[k],
        }
    }
    let value = dot(&p.objective, &x);
    Ok(LpOutcome::Optimal {
        solution: Vector::from_raw(x),
        value,
    })
}

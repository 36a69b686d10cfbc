//! Small dense linear programs: minimize c·x subject to A x ≥ b and
//! 0 ≤ x ≤ 1, solved by a two-phase bounded-variable primal simplex with
//! Bland's rule.

use crate::error::{Error, Result};

pub const EPS: f64 = 1e-6;
const PIVOT_EPS: f64 = 1e-9;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Coefficients to minimize.
    pub objective: Vec<f64>,
    /// Rows `(a, b)` meaning a·x ≥ b.
    pub rows: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, a: Vec<f64>, b: f64) {
        self.rows.push((a, b));
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let finite = self.objective.iter().all(|c| c.is_finite())
            && self
                .rows
                .iter()
                .all(|(a, b)| a.len() == n && b.is_finite() && a.iter().all(|x| x.is_finite()));
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidArgument("inconsistent or non-finite LP data".into()))
        }
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.validate()?;
        let n = self.num_vars();
        let m = self.rows.len();
        if m == 0 {
            let x: Vec<f64> = self.objective.iter().map(|&c| if c < 0.0 { 1.0 } else { 0.0 }).collect();
            let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
            return Ok(LpSolution { x, value });
        }
        let mut t = Tableau::new(self);
        let phase1: Vec<f64> = (0..t.cols).map(|j| if j >= n + m { 1.0 } else { 0.0 }).collect();
        t.optimize(&phase1);
        if t.value(&phase1) > EPS {
            return Err(Error::Infeasible("covering constraints cannot be met".into()));
        }
        // artificials stay at zero from here on
        for j in n + m..t.cols {
            t.upper[j] = 0.0;
        }
        let mut phase2 = vec![0.0; t.cols];
        phase2[..n].copy_from_slice(&self.objective);
        t.optimize(&phase2);
        let x: Vec<f64> = (0..n).map(|j| t.var_value(j).clamp(0.0, 1.0)).collect();
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, value })
    }
}

/// Columns: structural x (bound 1), surplus s (unbounded), artificial a.
struct Tableau {
    cols: usize,
    /// B⁻¹A, one row per constraint.
    a: Vec<Vec<f64>>,
    /// Current values of the basic variables.
    beta: Vec<f64>,
    basis: Vec<usize>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    is_basic: Vec<bool>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let cols = n + 2 * m;
        let mut a = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        for (i, (row, b)) in lp.rows.iter().enumerate() {
            // row·x − s_i + a_i = b, negated when b < 0 so that a_i = |b| ≥ 0
            let sign = if *b < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; cols];
            for (j, &v) in row.iter().enumerate() {
                r[j] = sign * v;
            }
            r[n + i] = -sign;
            r[n + m + i] = 1.0;
            a.push(r);
            beta.push(sign * b);
        }
        let mut upper = vec![f64::INFINITY; cols];
        for u in upper.iter_mut().take(n) {
            *u = 1.0;
        }
        let mut is_basic = vec![false; cols];
        for i in 0..m {
            is_basic[n + m + i] = true;
        }
        Tableau {
            cols,
            a,
            beta,
            basis: (n + m..cols).collect(),
            upper,
            at_upper: vec![false; cols],
            is_basic,
        }
    }

    fn var_value(&self, j: usize) -> f64 {
        if self.is_basic[j] {
            let r = self.basis.iter().position(|&b| b == j).expect("basic variable has a row");
            self.beta[r]
        } else if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn value(&self, cost: &[f64]) -> f64 {
        (0..self.cols).map(|j| cost[j] * self.var_value(j)).sum()
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for (i, &b) in self.basis.iter().enumerate() {
            d -= cost[b] * self.a[i][j];
        }
        d
    }

    fn optimize(&mut self, cost: &[f64]) {
        for _ in 0..MAX_ITERATIONS {
            // Bland: lowest-index improving column
            let entering = (0..self.cols).find(|&j| {
                if self.is_basic[j] || self.upper[j] <= 0.0 {
                    return false;
                }
                let d = self.reduced_cost(cost, j);
                if self.at_upper[j] {
                    d > PIVOT_EPS
                } else {
                    d < -PIVOT_EPS
                }
            });
            let Some(j) = entering else { return };
            let dir = if self.at_upper[j] { -1.0 } else { 1.0 };
            // ratio test; the entering variable's own bound is the first limit
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            for i in 0..self.a.len() {
                let alpha = dir * self.a[i][j];
                let b = self.basis[i];
                let (limit, to_upper) = if alpha > PIVOT_EPS {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if alpha < -PIVOT_EPS && self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                let better = if limit < step - PIVOT_EPS {
                    true
                } else if limit <= step + PIVOT_EPS {
                    leave.is_some_and(|(r, _)| b < self.basis[r])
                } else {
                    false
                };
                if better {
                    step = limit;
                    leave = Some((i, to_upper));
                }
            }
            if !step.is_finite() {
                // unbounded direction; cannot occur with the bounded covering data
                return;
            }
            for i in 0..self.a.len() {
                self.beta[i] -= dir * step * self.a[i][j];
            }
            match leave {
                None => self.at_upper[j] = !self.at_upper[j],
                Some((r, to_upper)) => {
                    let entering_value = if self.at_upper[j] { self.upper[j] - step } else { step };
                    let out = self.basis[r];
                    self.is_basic[out] = false;
                    self.at_upper[out] = to_upper;
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.is_basic[j] = true;
                    self.at_upper[j] = false;
                    self.basis[r] = j;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.a[r][j];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_cover() {
        let mut lp = LinearProgram::new(vec![1.0; 3]);
        lp.add_row(vec![1.0, 0.0, 1.0], 1.0);
        lp.add_row(vec![1.0, 1.0, 0.0], 1.0);
        lp.add_row(vec![0.0, 1.0, 1.0], 1.0);
        let s = lp.solve().unwrap();
        assert!((s.value - 1.5).abs() < 1e-9);
        for x in s.x {
            assert!((x - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_row() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(vec![0.0, 0.0], 1.0);
        assert!(matches!(lp.solve(), Err(Error::Infeasible(_))));
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row(vec![1.0], 2.0);
        assert!(lp.solve().is_err());
    }

    #[test]
    fn negative_rhs_and_bounds() {
        // maximize x + y with x + y ≤ 1.5 as: min −x − y, −x − y ≥ −1.5
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_row(vec![-1.0, -1.0], -1.5);
        let s = lp.solve().unwrap();
        assert!((s.value + 1.5).abs() < 1e-9);
        // no rows: every negative cost sits at its upper bound
        let s = LinearProgram::new(vec![-2.0, 3.0]).solve().unwrap();
        assert_eq!(s.x, vec![1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row(vec![1.0], 1.0);
        assert!(matches!(lp.solve(), Err(Error::InvalidArgument(_))));
    }
}

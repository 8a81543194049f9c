//! Dense two-phase simplex for `min c'x  s.t.  Ax = b, x >= 0`.
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, lowest basic
//! index leaves on ratio ties), so a solve is a deterministic function of its
//! inputs and cannot cycle. The solver is generic over [`LpScalar`] so the
//! same code runs in floating point and in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Field operations plus the sign tests the simplex needs.
pub trait LpScalar:
    Clone
    + PartialOrd
    + std::fmt::Debug
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// Strictly positive beyond pivot tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond pivot tolerance.
    fn is_neg(&self) -> bool;
    /// Phase-one objective above which the system is declared infeasible.
    fn infeasible(&self) -> bool;
}

const PIVOT_EPS: f64 = 1e-12;
const PHASE_ONE_EPS: f64 = 1e-9;

impl LpScalar for f64 {
    fn is_pos(&self) -> bool {
        *self > PIVOT_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -PIVOT_EPS
    }
    fn infeasible(&self) -> bool {
        *self > PHASE_ONE_EPS
    }
}

impl LpScalar for BigRational {
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn infeasible(&self) -> bool {
        self.is_positive()
    }
}

/// Exact rational from a finite `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Result<LpSolution<T>> {
        match self {
            LpOutcome::Optimal(s) => Ok(s),
            LpOutcome::Infeasible => Err(Error::Infeasible),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }
}

struct Tableau<T> {
    // rows[r] = [coefficients..., rhs]
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    n_cols: usize,
    pivots: usize,
    max_pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<T: LpScalar> Tableau<T> {
    fn rhs(&self, r: usize) -> &T {
        &self.rows[r][self.n_cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Reduced costs `c_j - c_B' B^{-1} A_j` for the active columns.
    fn reduced_costs(&self, cost: &[T], active: usize) -> Vec<T> {
        (0..active)
            .map(|j| {
                let mut rc = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    rc = rc - cost[b].clone() * self.rows[r][j].clone();
                }
                rc
            })
            .collect()
    }

    fn run(&mut self, cost: &[T], active: usize) -> Result<Step> {
        loop {
            if self.pivots >= self.max_pivots {
                return Err(Error::Numerical(format!("simplex exceeded {} pivots", self.max_pivots)));
            }
            let rc = self.reduced_costs(cost, active);
            let Some(enter) = (0..active).find(|&j| rc[j].is_neg() && !self.basis.contains(&j)) else {
                return Ok(Step::Optimal);
            };
            let mut leave: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(r).clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Ok(Step::Unbounded),
            }
        }
    }
}

/// Solves `min cost'x  s.t.  eq_lhs x = eq_rhs, x >= 0`.
pub fn lp_solve<T: LpScalar>(cost: &[T], eq_lhs: &[Vec<T>], eq_rhs: &[T]) -> Result<LpOutcome<T>> {
    let m = eq_rhs.len();
    let n = cost.len();
    if eq_lhs.len() != m || eq_lhs.iter().any(|r| r.len() != n) {
        return Err(Error::validation(format!("constraint matrix must be {m}x{n} to match rhs and cost lengths")));
    }

    // Columns: n structural, then m artificials, then rhs.
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (r, (lhs, rhs)) in eq_lhs.iter().zip(eq_rhs).enumerate() {
        let flip = rhs.is_neg();
        let mut row: Vec<T> = lhs.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == r { T::one() } else { T::zero() }));
        row.push(if flip { -rhs.clone() } else { rhs.clone() });
        rows.push(row);
    }
    let mut tab =
        Tableau { rows, basis: (n..width).collect(), n_cols: width, pivots: 0, max_pivots: 50 * (width + m) + 10_000 };

    // Phase one: minimise the sum of artificials.
    let mut phase_one_cost = vec![T::zero(); width];
    for c in phase_one_cost.iter_mut().skip(n) {
        *c = T::one();
    }
    tab.run(&phase_one_cost, width)?;
    let mut infeasibility = T::zero();
    for r in 0..m {
        if tab.basis[r] >= n {
            infeasibility = infeasibility + tab.rhs(r).clone();
        }
    }
    if infeasibility.infeasible() {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining (zero-valued) artificials out; drop redundant rows.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| {
                let a = &tab.rows[r][j];
                a.is_pos() || a.is_neg()
            }) {
                Some(j) => {
                    tab.pivot(r, j);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // Phase two on structural columns only.
    let mut full_cost = cost.to_vec();
    full_cost.extend((0..m).map(|_| T::zero()));
    match tab.run(&full_cost, n)? {
        Step::Unbounded => Ok(LpOutcome::Unbounded),
        Step::Optimal => {
            let mut x = vec![T::zero(); n];
            for (r, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    x[b] = tab.rhs(r).clone();
                }
            }
            let objective = cost.iter().zip(&x).fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
            Ok(LpOutcome::Optimal(LpSolution { objective, x, pivots: tab.pivots }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn single_variable() {
        let sol = lp_solve(&[1.0], &[vec![1.0]], &[1.0]).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, 1.0);
        assert_eq!(sol.x, vec![1.0]);
    }

    #[test]
    fn small_textbook_problem() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.  Optimum (8/5, 6/5), value -14/5.
        let a = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        let sol = lp_solve(&[-1.0, -1.0, 0.0, 0.0], &a, &[4.0, 6.0]).unwrap().optimal().unwrap();
        assert!((sol.objective + 2.8).abs() < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12 && (sol.x[1] - 1.2).abs() < 1e-12);

        let aq: Vec<Vec<BigRational>> = a.iter().map(|r| r.iter().map(|&v| rational_from_f64(v)).collect()).collect();
        let sol =
            lp_solve(&[q(-1, 1), q(-1, 1), q(0, 1), q(0, 1)], &aq, &[q(4, 1), q(6, 1)]).unwrap().optimal().unwrap();
        assert_eq!(sol.objective, q(-14, 5));
        assert_eq!(sol.x[0], q(8, 5));
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0.
        let out = lp_solve(&[0.0, 0.0], &[vec![1.0, 1.0]], &[-1.0]).unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
        // min -x s.t. x - y = 0.
        let out = lp_solve(&[-1.0, 0.0], &[vec![1.0, -1.0]], &[0.0]).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
        assert!(matches!(out.optimal(), Err(Error::Unbounded)));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        let sol = lp_solve(&[1.0, 2.0], &a, &[1.0, 2.0]).unwrap().optimal().unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        let sol = lp_solve(&[1.0, 1.0], &[vec![-1.0, -2.0]], &[-2.0]).unwrap().optimal().unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(lp_solve(&[1.0, 1.0], &[vec![1.0]], &[1.0]).is_err());
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) in equality form with slacks.
        let a = vec![
            vec![0.25, -8.0, -1.0, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -12.0, -0.5, 3.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let c = [-0.75, 20.0, -0.5, 6.0, 0.0, 0.0, 0.0];
        let sol = lp_solve(&c, &a, &[0.0, 0.0, 1.0]).unwrap().optimal().unwrap();
        assert!((sol.objective + 1.25).abs() < 1e-12);
    }
}

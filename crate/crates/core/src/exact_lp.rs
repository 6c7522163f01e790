//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's rule. Variables are free
//! or nonnegative; constraints are equations `<c, x> = rhs` and inequalities
//! `<c, x> <= rhs`. Optimal results carry dual multipliers that certify
//! optimality exactly:
//!
//! ```text
//! c = E^T mu + s (C^T lambda - rho),   value = e.mu + s h.lambda
//! ```
//!
//! with `s = +1` when maximizing and `-1` when minimizing, `lambda >= 0` on
//! the inequalities and `rho >= 0` on the sign constraints of nonnegative
//! variables.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    fn sign(self) -> i64 {
        match self {
            Sense::Maximize => 1,
            Sense::Minimize => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Free,
    NonNegative,
}

/// `<coeffs, x> = rhs` or `<coeffs, x> <= rhs`, depending on where it is
/// stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearConstraint {
    #[serde(with = "rational::serde_rational::vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        LinearConstraint { coeffs, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        rational::dot(&self.coeffs, x)
    }

    /// `rhs - <coeffs, x>`.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.rhs - self.lhs(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub variables: Vec<String>,
    pub kinds: Vec<VarKind>,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub equations: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
}

impl LinearProgram {
    /// A program over `num_vars` free variables named `x1, x2, ...`.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            variables: (1..=n).map(|k| format!("x{k}")).collect(),
            kinds: vec![VarKind::Free; n],
            sense,
            objective,
            equations: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn with_equation(mut self, coeffs: Vec<Rational>, rhs: Rational) -> Self {
        self.equations.push(LinearConstraint::new(coeffs, rhs));
        self
    }

    pub fn with_inequality(mut self, coeffs: Vec<Rational>, rhs: Rational) -> Self {
        self.inequalities.push(LinearConstraint::new(coeffs, rhs));
        self
    }

    pub fn nonnegative(mut self, var: usize) -> Self {
        self.kinds[var] = VarKind::NonNegative;
        self
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.variables.len() != n || self.kinds.len() != n {
            return Err(Error::domain(format!(
                "objective has {n} coefficients but {} names and {} kinds",
                self.variables.len(),
                self.kinds.len()
            )));
        }
        for (k, c) in self.equations.iter().chain(&self.inequalities).enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::domain(format!(
                    "constraint {k} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Primal feasibility of `x`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.equations.iter().all(|c| c.lhs(x) == c.rhs)
            && self.inequalities.iter().all(|c| !c.slack(x).is_negative())
            && self
                .kinds
                .iter()
                .zip(x)
                .all(|(k, v)| *k == VarKind::Free || !v.is_negative())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub value: Rational,
    pub primal: Vec<Rational>,
    pub dual_ineq: Vec<Rational>,
    pub dual_eq: Vec<Rational>,
    /// Multipliers on `x_k >= 0`; zero for free variables.
    pub dual_bounds: Vec<Rational>,
    pub pivots: usize,
}

impl LpResult {
    fn without_solution(status: LpStatus, pivots: usize) -> Self {
        LpResult {
            status,
            value: Rational::zero(),
            primal: Vec::new(),
            dual_ineq: Vec::new(),
            dual_eq: Vec::new(),
            dual_bounds: Vec::new(),
            pivots,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpResult> {
    let mut simplex = Simplex::new(lp)?;
    if !simplex.is_feasible() {
        return Ok(LpResult::without_solution(
            LpStatus::Infeasible,
            simplex.pivots,
        ));
    }
    Ok(simplex.optimize(&lp.objective, lp.sense))
}

/// Checks an optimal result exactly: primal feasibility, dual signs,
/// stationarity, zero duality gap and complementary slackness.
pub fn certify(lp: &LinearProgram, res: &LpResult) -> bool {
    if res.status != LpStatus::Optimal || lp.check().is_err() {
        return false;
    }
    let n = lp.num_vars();
    if res.primal.len() != n
        || res.dual_bounds.len() != n
        || res.dual_ineq.len() != lp.inequalities.len()
        || res.dual_eq.len() != lp.equations.len()
    {
        return false;
    }
    if !lp.is_feasible(&res.primal) {
        return false;
    }
    if res
        .dual_ineq
        .iter()
        .chain(&res.dual_bounds)
        .any(Signed::is_negative)
    {
        return false;
    }
    if lp
        .kinds
        .iter()
        .zip(&res.dual_bounds)
        .any(|(k, r)| *k == VarKind::Free && !r.is_zero())
    {
        return false;
    }
    let s = rational::int(lp.sense.sign());
    for j in 0..n {
        let mut g = -&res.dual_bounds[j];
        for (c, l) in lp.inequalities.iter().zip(&res.dual_ineq) {
            g += &c.coeffs[j] * l;
        }
        g *= &s;
        for (c, m) in lp.equations.iter().zip(&res.dual_eq) {
            g += &c.coeffs[j] * m;
        }
        if g != lp.objective[j] {
            return false;
        }
    }
    if rational::dot(&lp.objective, &res.primal) != res.value {
        return false;
    }
    let mut dual_value = Rational::zero();
    for (c, l) in lp.inequalities.iter().zip(&res.dual_ineq) {
        dual_value += &c.rhs * l;
    }
    dual_value *= &s;
    for (c, m) in lp.equations.iter().zip(&res.dual_eq) {
        dual_value += &c.rhs * m;
    }
    if dual_value != res.value {
        return false;
    }
    let ineq_cs = lp
        .inequalities
        .iter()
        .zip(&res.dual_ineq)
        .all(|(c, l)| l.is_zero() || c.slack(&res.primal).is_zero());
    let bound_cs = res
        .dual_bounds
        .iter()
        .zip(&res.primal)
        .all(|(r, x)| r.is_zero() || x.is_zero());
    ineq_cs && bound_cs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    /// Structural variable, possibly the negative half of a free variable.
    Var {
        var: usize,
        negated: bool,
    },
    Slack,
    Artificial,
}

/// A simplex tableau that stays primal feasible after phase one, so that
/// several objectives can be optimized in turn from the previous basis.
#[derive(Debug, Clone)]
pub struct Simplex {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    /// Column that held the unit vector of each row in the initial tableau.
    unit_col: Vec<usize>,
    /// `true` where the row was negated to make its right-hand side nonnegative.
    flipped: Vec<bool>,
    var_cols: Vec<(usize, Option<usize>)>,
    n_ineq: usize,
    n_eq: usize,
    feasible: bool,
    pivots: usize,
}

impl Simplex {
    /// Builds the tableau and runs phase one.
    pub fn new(lp: &LinearProgram) -> Result<Self> {
        lp.check()?;
        let n = lp.num_vars();
        let mut columns = Vec::new();
        let mut var_cols = Vec::with_capacity(n);
        for (var, kind) in lp.kinds.iter().enumerate() {
            let pos = columns.len();
            columns.push(Column::Var {
                var,
                negated: false,
            });
            let neg = if *kind == VarKind::Free {
                columns.push(Column::Var { var, negated: true });
                Some(pos + 1)
            } else {
                None
            };
            var_cols.push((pos, neg));
        }
        let n_ineq = lp.inequalities.len();
        let n_eq = lp.equations.len();
        let m = n_ineq + n_eq;
        let slack_start = columns.len();
        columns.extend(std::iter::repeat_n(Column::Slack, n_ineq));

        let constraints: Vec<&LinearConstraint> =
            lp.inequalities.iter().chain(&lp.equations).collect();
        let flipped: Vec<bool> = constraints.iter().map(|c| c.rhs.is_negative()).collect();
        let mut unit_col = vec![0; m];
        for r in 0..m {
            if r < n_ineq && !flipped[r] {
                unit_col[r] = slack_start + r;
            } else {
                unit_col[r] = columns.len();
                columns.push(Column::Artificial);
            }
        }

        let width = columns.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (r, c) in constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (pos, neg) = var_cols[j];
                row[pos] = a.clone();
                if let Some(neg) = neg {
                    row[neg] = -a;
                }
            }
            if r < n_ineq {
                row[slack_start + r] = rational::one();
            }
            let mut b = c.rhs.clone();
            if flipped[r] {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
                b = -b;
            }
            row[unit_col[r]] = rational::one();
            rows.push(row);
            rhs.push(b);
        }

        let mut simplex = Simplex {
            rows,
            rhs,
            basis: unit_col.clone(),
            columns,
            unit_col,
            flipped,
            var_cols,
            n_ineq,
            n_eq,
            feasible: false,
            pivots: 0,
        };
        simplex.phase_one();
        Ok(simplex)
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn phase_one(&mut self) {
        let costs: Vec<Rational> = self
            .columns
            .iter()
            .map(|c| {
                if *c == Column::Artificial {
                    rational::int(-1)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        let (mut reduced, mut value) = self.reduced_costs(&costs);
        let outcome = self.iterate(&mut reduced, &mut value, true);
        debug_assert_eq!(outcome, LpStatus::Optimal, "phase one is bounded");
        self.feasible = value.is_zero();
        if !self.feasible {
            return;
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // with no structural entry left are redundant and keep theirs.
        for r in 0..self.rows.len() {
            if self.columns[self.basis[r]] != Column::Artificial {
                continue;
            }
            let entering = (0..self.columns.len())
                .find(|&j| self.columns[j] != Column::Artificial && !self.rows[r][j].is_zero());
            if let Some(j) = entering {
                self.pivot(r, j, None);
            }
        }
    }

    /// Reduced costs `c_B B^-1 A_j - c_j` and objective value for `costs`
    /// (a maximization) under the current basis.
    fn reduced_costs(&self, costs: &[Rational]) -> (Vec<Rational>, Rational) {
        let mut reduced: Vec<Rational> = costs.iter().map(|c| -c).collect();
        let mut value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (d, t) in reduced.iter_mut().zip(&self.rows[r]) {
                if !t.is_zero() {
                    *d += cb * t;
                }
            }
            value += cb * &self.rhs[r];
        }
        (reduced, value)
    }

    /// Bland's rule iterations. Artificial columns may enter only in phase one.
    fn iterate(
        &mut self,
        reduced: &mut Vec<Rational>,
        value: &mut Rational,
        phase_one: bool,
    ) -> LpStatus {
        loop {
            let entering = (0..self.columns.len()).find(|&j| {
                (phase_one || self.columns[j] != Column::Artificial) && reduced[j].is_negative()
            });
            let Some(j) = entering else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[r] < self.basis[*best])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Unbounded;
            };
            self.pivot(r, j, Some((reduced, value)));
        }
    }

    fn pivot(
        &mut self,
        r: usize,
        j: usize,
        objective: Option<(&mut Vec<Rational>, &mut Rational)>,
    ) {
        self.pivots += 1;
        let p = self.rows[r][j].clone();
        if p != rational::one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let support: Vec<usize> = (0..self.columns.len())
            .filter(|&k| !self.rows[r][k].is_zero())
            .collect();
        let (pivot_row, rest) = split_row(&mut self.rows, r);
        let pivot_rhs = self.rhs[r].clone();
        for (k, row) in rest {
            let f = row[j].clone();
            if f.is_zero() {
                continue;
            }
            for &c in &support {
                let delta = &f * &pivot_row[c];
                row[c] -= delta;
            }
            self.rhs[k] -= &f * &pivot_rhs;
        }
        if let Some((reduced, value)) = objective {
            let f = reduced[j].clone();
            if !f.is_zero() {
                for &c in &support {
                    let delta = &f * &pivot_row[c];
                    reduced[c] -= delta;
                }
                *value -= &f * &pivot_rhs;
            }
        }
        self.basis[r] = j;
    }

    /// Optimizes `objective` from the current (feasible) basis.
    pub fn optimize(&mut self, objective: &[Rational], sense: Sense) -> LpResult {
        let start = self.pivots;
        if !self.feasible {
            return LpResult::without_solution(LpStatus::Infeasible, 0);
        }
        let sign = rational::int(sense.sign());
        let costs: Vec<Rational> = self
            .columns
            .iter()
            .map(|c| match *c {
                Column::Var { var, negated } => {
                    let v = &objective[var] * &sign;
                    if negated {
                        -v
                    } else {
                        v
                    }
                }
                _ => Rational::zero(),
            })
            .collect();
        let (mut reduced, mut value) = self.reduced_costs(&costs);
        let status = self.iterate(&mut reduced, &mut value, false);
        let pivots = self.pivots - start;
        if status == LpStatus::Unbounded {
            return LpResult::without_solution(LpStatus::Unbounded, pivots);
        }

        let mut col_value = vec![Rational::zero(); self.columns.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            col_value[b] = self.rhs[r].clone();
        }
        let primal: Vec<Rational> = self
            .var_cols
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &col_value[pos] - &col_value[neg],
                None => col_value[pos].clone(),
            })
            .collect();
        let dual_bounds: Vec<Rational> = self
            .var_cols
            .iter()
            .map(|&(pos, neg)| {
                if neg.is_some() {
                    Rational::zero()
                } else {
                    reduced[pos].clone()
                }
            })
            .collect();
        let row_dual = |r: usize| -> Rational {
            let y = reduced[self.unit_col[r]].clone();
            if self.flipped[r] {
                -y
            } else {
                y
            }
        };
        let dual_ineq: Vec<Rational> = (0..self.n_ineq).map(row_dual).collect();
        let mut dual_eq: Vec<Rational> = (self.n_ineq..self.n_ineq + self.n_eq)
            .map(row_dual)
            .collect();
        if sense == Sense::Minimize {
            value = -value;
            for m in dual_eq.iter_mut() {
                *m = -&*m;
            }
        }
        LpResult {
            status: LpStatus::Optimal,
            value,
            primal,
            dual_ineq,
            dual_eq,
            dual_bounds,
            pivots,
        }
    }

    /// The current tableau as CSV, one line per row with the basic column
    /// first and the right-hand side last.
    pub fn tableau_csv(&self) -> String {
        let mut out = String::from("basis");
        for j in 0..self.columns.len() {
            let _ = write!(out, ",c{j}");
        }
        out.push_str(",rhs\n");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "c{}", self.basis[r]);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", self.rhs[r]);
        }
        out
    }
}

type RestRows<'a> = Vec<(usize, &'a mut Vec<Rational>)>;

fn split_row(rows: &mut [Vec<Rational>], r: usize) -> (&Vec<Rational>, RestRows<'_>) {
    let (before, after) = rows.split_at_mut(r);
    let (pivot, after) = after.split_first_mut().expect("pivot row in range");
    let rest = before
        .iter_mut()
        .enumerate()
        .chain(
            after
                .iter_mut()
                .enumerate()
                .map(|(k, row)| (k + r + 1, row)),
        )
        .collect();
    (pivot, rest)
}

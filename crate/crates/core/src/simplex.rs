//! Exact two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are tiny (a handful of variables and constraints), so the solver
//! keeps a dense tableau of [`Rational`]s and does no presolve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, RatVector};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// `maximize objective·x` subject to `constraints·x (rel) rhs` and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: RatVector,
    bounds: Vec<VarBound>,
    rows: Vec<Vec<Rational>>,
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
}

impl LpProblem {
    pub fn new(objective: RatVector, bounds: Vec<VarBound>) -> Result<Self> {
        if objective.dim() != bounds.len() {
            return Err(Error::DimensionMismatch { expected: objective.dim(), found: bounds.len() });
        }
        Ok(LpProblem { objective, bounds, rows: Vec::new(), relations: Vec::new(), rhs: Vec::new() })
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch { expected: self.num_vars(), found: coeffs.len() });
        }
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &RatVector {
        &self.objective
    }

    pub fn constraint_matrix(&self) -> RatMatrix {
        if self.rows.is_empty() {
            return RatMatrix::zeros(0, self.num_vars());
        }
        RatMatrix::from_rows(self.rows.clone()).expect("rows validated on insert")
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn bounds(&self) -> &[VarBound] {
        &self.bounds
    }

    /// Exact check that `x` satisfies every constraint and bound.
    pub fn is_feasible(&self, x: &RatVector) -> bool {
        if x.dim() != self.num_vars() {
            return false;
        }
        let bounds_ok = self.bounds.iter().zip(x.iter()).all(|(b, v)| *b == VarBound::Free || !v.is_negative());
        bounds_ok
            && self.rows.iter().zip(&self.relations).zip(&self.rhs).all(|((row, rel), b)| {
                let lhs: Rational = row.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
                rel.holds(&lhs, b)
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// For non-optimal statuses `x` is all zeros and `objective_value` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: RatVector,
    pub objective_value: Rational,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].checked_recip().expect("pivot on zero");
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut d = cost[j].clone();
        for (row, &b) in self.t.iter().zip(&self.basis) {
            if !cost[b].is_zero() && !row[j].is_zero() {
                d -= &cost[b] * &row[j];
            }
        }
        d
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.t.iter().zip(&self.basis).map(|(row, &b)| &cost[b] * &row[self.cols]).sum()
    }

    /// Maximizes `cost·x` over allowed entering columns. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols)
                .filter(|&j| allowed[j] && !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(c) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[c];
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub fn simplex_max(problem: &LpProblem) -> LpSolution {
    let n = problem.num_vars();

    // Split free variables into positive and negative parts.
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut structural = 0;
    for b in &problem.bounds {
        match b {
            VarBound::NonNegative => {
                var_cols.push((structural, None));
                structural += 1;
            }
            VarBound::Free => {
                var_cols.push((structural, Some(structural + 1)));
                structural += 2;
            }
        }
    }

    let m = problem.num_constraints();
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::with_capacity(m);
    for ((coeffs, &rel), b) in problem.rows.iter().zip(&problem.relations).zip(&problem.rhs) {
        let mut row = vec![Rational::zero(); structural];
        for (j, a) in coeffs.iter().enumerate() {
            let (p, q) = var_cols[j];
            row[p] = a.clone();
            if let Some(q) = q {
                row[q] = -a;
            }
        }
        if b.is_negative() {
            rows.push((row.into_iter().map(|v| -v).collect(), rel.flipped(), -b));
        } else {
            rows.push((row, rel, b.clone()));
        }
    }

    let slacks = rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let artificials = rows.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let cols = structural + slacks + artificials;
    let first_artificial = structural + slacks;

    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (structural, first_artificial);
    for (coeffs, rel, b) in rows {
        let mut row = coeffs;
        row.resize(cols + 1, Rational::zero());
        row[cols] = b;
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, cols };

    let failed = |status| LpSolution { status, x: RatVector::zeros(n), objective_value: Rational::zero() };

    // Phase 1: maximize -(sum of artificials).
    if artificials > 0 {
        let mut cost = vec![Rational::zero(); cols];
        for c in cost.iter_mut().skip(first_artificial) {
            *c = -Rational::one();
        }
        let all = vec![true; cols];
        tab.optimize(&cost, &all);
        if tab.objective(&cost).is_negative() {
            return failed(LpStatus::Infeasible);
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= first_artificial {
                match (0..first_artificial).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    for (j, c) in problem.objective.iter().enumerate() {
        let (p, q) = var_cols[j];
        cost[p] = c.clone();
        if let Some(q) = q {
            cost[q] = -c;
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < first_artificial).collect();
    if !tab.optimize(&cost, &allowed) {
        return failed(LpStatus::Unbounded);
    }

    let mut values = vec![Rational::zero(); cols];
    for (row, &b) in tab.t.iter().zip(&tab.basis) {
        values[b] = row[cols].clone();
    }
    let x: RatVector = var_cols
        .iter()
        .map(|&(p, q)| match q {
            Some(q) => &values[p] - &values[q],
            None => values[p].clone(),
        })
        .collect();
    let objective_value = problem.objective.dot(&x).expect("objective sized to variables");
    LpSolution { status: LpStatus::Optimal, x, objective_value }
}

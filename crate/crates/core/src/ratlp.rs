//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's least-index pivot rule, which
//! cannot cycle. Problem sizes here are tiny (at most a few hundred columns
//! and ten rows), so the dense tableau is the right tool.

use crate::error::{Error, Result};
use crate::lattice::DivClass;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Minimize `objective . x` subject to the constraints and variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl LinearProgram {
    /// All variables nonnegative by default.
    pub fn minimize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn free(mut self, var: usize) -> Self {
        self.bounds[var] = VarBound::Free;
        self
    }

    pub fn constraint(mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.bounds.len(),
            });
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: c.coeffs.len(),
                });
            }
        }
        Ok(())
    }

    /// True when `point` satisfies every constraint and bound exactly.
    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        if point.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = point
            .iter()
            .zip(&self.bounds)
            .all(|(x, b)| *b == VarBound::Free || !x.is_negative());
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

/// Solves the program exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let standard = StandardForm::build(lp);
    let mut tab = Tableau::new(&standard);

    // Phase 1: minimize the sum of artificials.
    let n_cols = standard.n_cols;
    let phase1_cost: Vec<Rational> = (0..n_cols)
        .map(|j| {
            if standard.is_artificial(j) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let all_cols = vec![true; n_cols];
    if tab.optimize(&phase1_cost, &all_cols) == Step::Unbounded {
        return Err(Error::Invariant("phase-one program reported unbounded".into()));
    }
    if !tab.objective(&phase1_cost).is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    tab.drive_out_artificials(&standard);

    // Phase 2 over the structural and slack columns only.
    let allowed: Vec<bool> = (0..n_cols).map(|j| !standard.is_artificial(j)).collect();
    let mut cost = vec![Rational::zero(); n_cols];
    for (j, col) in standard.var_columns.iter().enumerate() {
        cost[col.0] = lp.objective[j].clone();
        if let Some(neg) = col.1 {
            cost[neg] = -&lp.objective[j];
        }
    }
    if tab.optimize(&cost, &allowed) == Step::Unbounded {
        return Ok(LpOutcome::Unbounded);
    }

    let values = tab.column_values(n_cols);
    let point: Vec<Rational> = standard
        .var_columns
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => &values[pos] - &values[neg],
            None => values[pos].clone(),
        })
        .collect();
    let value = lp.objective_at(&point);
    if !lp.is_feasible_point(&point) {
        return Err(Error::Invariant("simplex returned an infeasible point".into()));
    }
    Ok(LpOutcome::Optimal { value, point })
}

/// Equality-form program `A y = b`, `y >= 0`, `b >= 0` with an artificial
/// column per row that lacks a natural slack basis column.
struct StandardForm {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// For each original variable: the positive column and, for free
    /// variables, the negative part column.
    var_columns: Vec<(usize, Option<usize>)>,
    first_artificial: usize,
    n_cols: usize,
    initial_basis: Vec<usize>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut var_columns = Vec::with_capacity(lp.num_vars());
        let mut next = 0;
        for b in &lp.bounds {
            match b {
                VarBound::NonNegative => {
                    var_columns.push((next, None));
                    next += 1;
                }
                VarBound::Free => {
                    var_columns.push((next, Some(next + 1)));
                    next += 2;
                }
            }
        }
        let n_struct = next;
        let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let m = lp.constraints.len();
        let first_artificial = n_struct + n_slack;
        let n_cols = first_artificial + m;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut initial_basis = Vec::with_capacity(m);
        let mut slack = n_struct;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); n_cols];
            for (j, a) in c.coeffs.iter().enumerate() {
                let (pos, neg) = var_columns[j];
                row[pos] = a.clone();
                if let Some(neg) = neg {
                    row[neg] = -a;
                }
            }
            let mut slack_col = None;
            if c.relation != Relation::Eq {
                row[slack] = match c.relation {
                    Relation::Le => Rational::one(),
                    _ => Rational::integer(-1),
                };
                slack_col = Some(slack);
                slack += 1;
            }
            let mut b = c.rhs.clone();
            if b.is_negative() {
                row.iter_mut().for_each(|x| *x = -&*x);
                b = -b;
            }
            let art = first_artificial + i;
            row[art] = Rational::one();
            // A slack with +1 after sign normalization is a ready basis column.
            match slack_col {
                Some(sc) if row[sc] == Rational::one() => initial_basis.push(sc),
                _ => initial_basis.push(art),
            }
            rows.push(row);
            rhs.push(b);
        }
        StandardForm {
            rows,
            rhs,
            var_columns,
            first_artificial,
            n_cols,
            initial_basis,
        }
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.first_artificial
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(sf: &StandardForm) -> Self {
        let mut rows = sf.rows.clone();
        // Artificial columns of rows that start on a slack are never needed.
        for (i, row) in rows.iter_mut().enumerate() {
            if sf.initial_basis[i] != sf.first_artificial + i {
                row[sf.first_artificial + i] = Rational::zero();
            }
        }
        Tableau {
            rows,
            rhs: sf.rhs.clone(),
            basis: sf.initial_basis.clone(),
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut rc = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            let a = &self.rows[i][j];
            if !a.is_zero() && !cost[b].is_zero() {
                rc -= &(&cost[b] * a);
            }
        }
        rc
    }

    /// Bland's rule: entering column is the least index with negative reduced
    /// cost; leaving row minimizes the ratio, ties broken by least basic index.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Step {
        loop {
            let entering = (0..cost.len())
                .filter(|&j| allowed[j] && !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else {
                return Step::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                None => return Step::Unbounded,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].recip();
        for x in self.rows[row].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &p;
            }
        }
        self.rhs[row] = &self.rhs[row] * &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (x, y) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &(&factor * y);
                }
            }
            self.rhs[i] -= &(&factor * &pivot_rhs);
        }
        self.basis[row] = col;
    }

    /// After a zero-value phase one, pivot artificials out of the basis or
    /// drop the rows they sit on when those rows are redundant.
    fn drive_out_artificials(&mut self, sf: &StandardForm) {
        let mut i = 0;
        while i < self.rows.len() {
            if sf.is_artificial(self.basis[i]) {
                let replacement = (0..sf.first_artificial).find(|&j| !self.rows[i][j].is_zero());
                match replacement {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    fn column_values(&self, n_cols: usize) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); n_cols];
        for (i, &b) in self.basis.iter().enumerate() {
            values[b] = self.rhs[i].clone();
        }
        values
    }
}

/// Result of a cone membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes(Vec<Rational>),
    No,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Yes(_))
    }
}

/// Decides whether `target` is a nonnegative combination of `generators`.
/// A `Yes` carries coefficients that have been re-verified by substitution.
pub fn cone_member(target: &DivClass, generators: &[DivClass]) -> Result<Membership> {
    let r = target.r();
    for g in generators {
        if g.r() != r {
            return Err(Error::Dimension {
                expected: r,
                got: g.r(),
            });
        }
    }
    if target.is_zero() {
        return Ok(Membership::Yes(vec![Rational::zero(); generators.len()]));
    }
    let n = generators.len();
    let mut lp = LinearProgram::minimize(vec![Rational::zero(); n]);
    let coords: Vec<Vec<&Rational>> = generators.iter().map(|g| g.coords().collect()).collect();
    for (k, t) in target.coords().enumerate() {
        let row = coords.iter().map(|c| c[k].clone()).collect();
        lp.add_constraint(row, Relation::Eq, t.clone());
    }
    match solve(&lp)? {
        LpOutcome::Optimal { point, .. } => {
            let mut sum = DivClass {
                h: Rational::zero(),
                e: vec![Rational::zero(); r],
            };
            for (t, g) in point.iter().zip(generators) {
                if !t.is_zero() {
                    sum = sum.add_scaled(t, g);
                }
            }
            if sum != *target || point.iter().any(Rational::is_negative) {
                return Err(Error::Invariant(
                    "cone membership certificate failed substitution".into(),
                ));
            }
            Ok(Membership::Yes(point))
        }
        LpOutcome::Infeasible => Ok(Membership::No),
        LpOutcome::Unbounded => Err(Error::Invariant("feasibility program reported unbounded".into())),
    }
}

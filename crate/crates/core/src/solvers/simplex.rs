//! Exact bounded dual simplex on a dense rational tableau.
//!
//! Problem: minimize `c . x` subject to `0 <= x_j <= u_j` and
//! `lb_i <= a_i . x <= ub_i`. Each row gets a logical variable `s_i = a_i . x`
//! carrying the row bounds, so the system is homogeneous and the starting
//! basis is all logicals. With every `x_j` at the bound matching the sign of
//! `c_j` that basis is dual feasible, no phase one is needed, and rows added
//! later keep it dual feasible, which is what a cutting-plane loop wants.
//! Leaving and entering choices follow Bland's rule, which rules out cycling.

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    /// Sparse coefficients over structural columns.
    pub coeffs: Vec<(usize, Rational)>,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Row {
    pub fn equal(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Row {
        Row { coeffs, lower: Some(rhs.clone()), upper: Some(rhs) }
    }

    pub fn at_least(coeffs: Vec<(usize, Rational)>, rhs: Rational) -> Row {
        Row { coeffs, lower: Some(rhs), upper: None }
    }

    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// One multiplier per row, in row order.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

#[derive(Clone, Debug)]
struct Var {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

impl Var {
    fn fixed(&self) -> bool {
        matches!((&self.lower, &self.upper), (Some(a), Some(b)) if a == b)
    }
}

#[derive(Clone, Debug)]
pub struct DualSimplex {
    costs: Vec<Rational>,
    rows: Vec<Row>,
    vars: Vec<Var>,
    /// Variable at each nonbasic column.
    nonbasic: Vec<usize>,
    /// For nonbasic variables: sitting at the upper bound.
    at_upper: Vec<bool>,
    /// Basic variable of each tableau row.
    basic: Vec<usize>,
    /// Tableau row or nonbasic column of each variable.
    place: Vec<Place>,
    tableau: Vec<Vec<Rational>>,
    beta: Vec<Rational>,
    reduced: Vec<Rational>,
    pivots: usize,
    max_pivots: usize,
}

#[derive(Clone, Copy, Debug)]
enum Place {
    Basic(usize),
    Nonbasic(usize),
}

impl DualSimplex {
    /// Structural variables with bounds `[0, upper_j]`.
    pub fn new(costs: Vec<Rational>, upper: Vec<Option<Rational>>) -> Result<Self, SolverError> {
        if costs.len() != upper.len() {
            return Err(SolverError::Shape { expected: costs.len(), got: upper.len() });
        }
        let m = costs.len();
        let mut at_upper = Vec::with_capacity(m);
        for (j, (c, u)) in costs.iter().zip(&upper).enumerate() {
            if c.is_negative() && u.is_none() {
                return Err(SolverError::Unbounded { column: j });
            }
            at_upper.push(c.is_negative());
        }
        let vars = upper.into_iter().map(|u| Var { lower: Some(Rational::zero()), upper: u }).collect();
        Ok(DualSimplex {
            reduced: costs.clone(),
            costs,
            rows: Vec::new(),
            vars,
            nonbasic: (0..m).collect(),
            at_upper,
            basic: Vec::new(),
            place: (0..m).map(Place::Nonbasic).collect(),
            tableau: Vec::new(),
            beta: Vec::new(),
            pivots: 0,
            max_pivots: usize::MAX,
        })
    }

    pub fn set_pivot_limit(&mut self, limit: usize) {
        self.max_pivots = limit;
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn columns(&self) -> usize {
        self.costs.len()
    }

    fn value_of(&self, var: usize) -> Rational {
        match self.place[var] {
            Place::Basic(r) => self.beta[r].clone(),
            Place::Nonbasic(c) => self.nonbasic_value(c),
        }
    }

    fn nonbasic_value(&self, col: usize) -> Rational {
        let v = &self.vars[self.nonbasic[col]];
        let bound = if self.at_upper[col] { &v.upper } else { &v.lower };
        bound.clone().expect("nonbasic variables sit at a finite bound")
    }

    /// Adds a row; its logical variable enters the basis.
    pub fn add_row(&mut self, row: Row) -> Result<(), SolverError> {
        if let Some(&(j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.costs.len()) {
            return Err(SolverError::Shape { expected: self.costs.len(), got: j + 1 });
        }
        if row.lower.is_none() && row.upper.is_none() {
            return Err(SolverError::FreeRow);
        }
        let cols = self.nonbasic.len();
        let mut t = vec![Rational::zero(); cols];
        for (j, a) in &row.coeffs {
            match self.place[*j] {
                Place::Nonbasic(c) => t[c] += a,
                Place::Basic(r) => {
                    for (slot, v) in t.iter_mut().zip(&self.tableau[r]) {
                        if !v.is_zero() {
                            *slot += a * v;
                        }
                    }
                }
            }
        }
        let beta = t.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| v * &self.nonbasic_value(c)).sum();
        let var = self.vars.len();
        self.vars.push(Var { lower: row.lower.clone(), upper: row.upper.clone() });
        self.place.push(Place::Basic(self.basic.len()));
        self.basic.push(var);
        self.tableau.push(t);
        self.beta.push(beta);
        self.rows.push(row);
        Ok(())
    }

    /// Smallest-index basic variable outside its bounds, with the bound it must reach.
    fn leaving(&self) -> Option<(usize, Rational, bool)> {
        let mut best: Option<(usize, usize, Rational, bool)> = None;
        for (r, &var) in self.basic.iter().enumerate() {
            let v = &self.vars[var];
            let b = &self.beta[r];
            let target = match (&v.lower, &v.upper) {
                (Some(lo), _) if b < lo => Some((lo.clone(), false)),
                (_, Some(hi)) if b > hi => Some((hi.clone(), true)),
                _ => None,
            };
            if let Some((bound, to_upper)) = target {
                if best.as_ref().is_none_or(|(bv, ..)| var < *bv) {
                    best = Some((var, r, bound, to_upper));
                }
            }
        }
        best.map(|(_, r, bound, up)| (r, bound, up))
    }

    /// Ratio test on row `r`. `increase` says whether the basic variable
    /// must go up. Ties go to the smallest variable index.
    fn entering(&self, r: usize, increase: bool) -> Option<usize> {
        let mut best: Option<(Rational, usize, usize)> = None;
        for (c, alpha) in self.tableau[r].iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            let var = self.nonbasic[c];
            if self.vars[var].fixed() {
                continue;
            }
            let up = self.at_upper[c];
            // At lower the variable can only rise, at upper only fall.
            let helps = if increase { alpha.is_positive() != up } else { alpha.is_negative() != up };
            if !helps {
                continue;
            }
            let ratio = (&self.reduced[c] / alpha).abs();
            let better = match &best {
                None => true,
                Some((br, bv, _)) => ratio < *br || (ratio == *br && var < *bv),
            };
            if better {
                best = Some((ratio, var, c));
            }
        }
        best.map(|(_, _, c)| c)
    }

    fn pivot(&mut self, r: usize, c: usize, bound: Rational, to_upper: bool) {
        let alpha = self.tableau[r][c].clone();
        let theta = (&bound - &self.beta[r]) / &alpha;
        let entering_value = self.nonbasic_value(c) + &theta;
        for i in 0..self.basic.len() {
            if i != r && !self.tableau[i][c].is_zero() {
                let delta = &self.tableau[i][c] * &theta;
                self.beta[i] += delta;
            }
        }
        self.beta[r] = entering_value;

        let inv = alpha.recip();
        let mut pivot_row = std::mem::take(&mut self.tableau[r]);
        for (k, v) in pivot_row.iter_mut().enumerate() {
            *v = if k == c {
                inv.clone()
            } else if v.is_zero() {
                Rational::zero()
            } else {
                -(&*v * &inv)
            };
        }
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&k| k != c && !pivot_row[k].is_zero()).collect();
        for i in 0..self.basic.len() {
            if i == r || self.tableau[i][c].is_zero() {
                continue;
            }
            let factor = self.tableau[i][c].clone();
            let row = &mut self.tableau[i];
            for &k in &nz {
                row[k] += &factor * &pivot_row[k];
            }
            row[c] = &factor * &inv;
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for &k in &nz {
                self.reduced[k] += &factor * &pivot_row[k];
            }
            self.reduced[c] = &factor * &inv;
        }
        self.tableau[r] = pivot_row;

        let leaving = self.basic[r];
        let entering = self.nonbasic[c];
        self.basic[r] = entering;
        self.nonbasic[c] = leaving;
        self.place[entering] = Place::Basic(r);
        self.place[leaving] = Place::Nonbasic(c);
        self.at_upper[c] = to_upper;
        self.pivots += 1;
    }

    /// Re-optimizes from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution, SolverError> {
        while let Some((r, bound, to_upper)) = self.leaving() {
            if self.pivots >= self.max_pivots {
                return Err(SolverError::PivotLimit(self.max_pivots));
            }
            let Some(c) = self.entering(r, !to_upper) else {
                return Err(SolverError::Infeasible);
            };
            self.pivot(r, c, bound, to_upper);
        }
        let m = self.costs.len();
        let x: Vec<Rational> = (0..m).map(|j| self.value_of(j)).collect();
        let value = self.costs.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals = (0..self.rows.len())
            .map(|i| match self.place[m + i] {
                Place::Nonbasic(c) => self.reduced[c].clone(),
                Place::Basic(_) => Rational::zero(),
            })
            .collect();
        Ok(LpSolution { value, x, duals, pivots: self.pivots })
    }
}

/// Lower bound on the objective implied by row multipliers `y`:
/// `c.x >= sum_i y_i (a_i.x) + sum_j r_j x_j` with `r = c - y A`, each term
/// bounded using the row and column bounds. Returns `None` if a multiplier
/// has a sign that its row bounds cannot support.
pub fn dual_bound(costs: &[Rational], upper: &[Option<Rational>], rows: &[Row], y: &[Rational]) -> Option<Rational> {
    if y.len() != rows.len() || upper.len() != costs.len() {
        return None;
    }
    let mut reduced = costs.to_vec();
    let mut bound = Rational::zero();
    for (row, yi) in rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        let side = if yi.is_positive() { &row.lower } else { &row.upper };
        bound += yi * side.as_ref()?;
        for (j, a) in &row.coeffs {
            reduced[*j] -= yi * a;
        }
    }
    for (r, u) in reduced.iter().zip(upper) {
        if r.is_negative() {
            bound += r * u.as_ref()?;
        }
    }
    Some(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn one() -> Option<Rational> {
        Some(Rational::one())
    }

    #[test]
    fn small_covering_lp() {
        // min 2a + 3b + c  s.t. a + b >= 1, b + c >= 1, a + c >= 1, box [0,1].
        let costs = vec![q(2, 1), q(3, 1), q(1, 1)];
        let mut lp = DualSimplex::new(costs.clone(), vec![one(); 3]).unwrap();
        let rows = vec![
            Row::at_least(vec![(0, q(1, 1)), (1, q(1, 1))], q(1, 1)),
            Row::at_least(vec![(1, q(1, 1)), (2, q(1, 1))], q(1, 1)),
            Row::at_least(vec![(0, q(1, 1)), (2, q(1, 1))], q(1, 1)),
        ];
        for r in &rows {
            lp.add_row(r.clone()).unwrap();
        }
        let sol = lp.solve().unwrap();
        // Both (1/2, 1/2, 1/2) and (1, 0, 1) attain the optimum 3.
        assert_eq!(sol.value, q(3, 1));
        assert_eq!(dual_bound(&costs, &[one(), one(), one()], &rows, &sol.duals), Some(q(3, 1)));
        for r in &rows {
            assert!(r.activity(&sol.x) >= q(1, 1));
        }
    }

    #[test]
    fn equality_rows_and_warm_start() {
        // min x0 + 2 x1 + 3 x2 with x0 + x1 + x2 = 2.
        let costs = vec![q(1, 1), q(2, 1), q(3, 1)];
        let mut lp = DualSimplex::new(costs, vec![one(); 3]).unwrap();
        let all = vec![(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))];
        lp.add_row(Row::equal(all, q(2, 1))).unwrap();
        assert_eq!(lp.solve().unwrap().value, q(3, 1));
        lp.add_row(Row::at_least(vec![(2, q(2, 1))], q(1, 1))).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.x, vec![q(1, 1), q(1, 2), q(1, 2)]);
        assert_eq!(sol.value, q(7, 2));
    }

    #[test]
    fn infeasible_is_reported() {
        let mut lp = DualSimplex::new(vec![q(1, 1)], vec![one()]).unwrap();
        lp.add_row(Row::at_least(vec![(0, q(1, 1))], q(2, 1))).unwrap();
        assert!(matches!(lp.solve(), Err(SolverError::Infeasible)));
    }

    #[test]
    fn negative_cost_starts_at_upper() {
        let mut lp = DualSimplex::new(vec![q(-1, 1), q(1, 1)], vec![one(), one()]).unwrap();
        lp.add_row(Row { coeffs: vec![(0, q(1, 1)), (1, q(1, 1))], lower: None, upper: Some(q(1, 2)) }).unwrap();
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, q(-1, 2));
        assert!(DualSimplex::new(vec![q(-1, 1)], vec![None]).is_err());
    }

    #[test]
    fn dual_bound_rejects_wrong_signs() {
        let rows = vec![Row::at_least(vec![(0, q(1, 1))], q(1, 1))];
        assert_eq!(dual_bound(&[q(1, 1)], &[one()], &rows, &[q(-1, 1)]), None);
        assert_eq!(dual_bound(&[q(1, 1)], &[one()], &rows, &[q(1, 1)]), Some(q(1, 1)));
    }
}

//! Exact rational linear programming.
//!
//! A dense-tableau two-phase simplex over [`Rational`]. Pivoting follows
//! Bland's rule (lowest eligible column enters, ties in the ratio test go to
//! the lowest basic variable), so every solve terminates and identical
//! programs produce identical points.

use num_traits::{Signed, Zero};

use crate::error::{domain, Result};
use crate::rational::{dot, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `rows` over `num_vars` variables with per-variable lower bounds
/// (`None` marks a free variable; the default bound is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Constraint>,
    pub objective: Option<(Vec<Rational>, Sense)>,
    pub lower_bounds: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    pub point: Option<Vec<Rational>>,
    pub objective_value: Option<Rational>,
}

impl LpResult {
    fn bare(status: LpStatus) -> Self {
        LpResult {
            status,
            point: None,
            objective_value: None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.status, LpStatus::Feasible | LpStatus::Optimal)
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
            objective: None,
            lower_bounds: vec![Some(zero()); num_vars],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.rows.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn add_le(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.add_row(coeffs, Relation::Le, rhs);
    }

    pub fn add_ge(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.add_row(coeffs, Relation::Ge, rhs);
    }

    pub fn add_eq(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        self.add_row(coeffs, Relation::Eq, rhs);
    }

    pub fn minimize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some((coeffs, Sense::Min));
    }

    pub fn maximize(&mut self, coeffs: Vec<Rational>) {
        self.objective = Some((coeffs, Sense::Max));
    }

    pub fn set_free(&mut self, var: usize) {
        self.lower_bounds[var] = None;
    }

    pub fn set_all_free(&mut self) {
        self.lower_bounds.iter_mut().for_each(|b| *b = None);
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars == 0 {
            return domain("linear program has no variables");
        }
        if self.lower_bounds.len() != self.num_vars {
            return domain("lower bound count differs from variable count");
        }
        if let Some((c, _)) = &self.objective {
            if c.len() != self.num_vars {
                return domain("objective length differs from variable count");
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return domain(format!(
                    "row {i} has {} coefficients, expected {}",
                    row.coeffs.len(),
                    self.num_vars
                ));
            }
        }
        Ok(())
    }
}

/// Checks `point` against every row and bound exactly.
pub fn assert_feasible_point(lp: &LinearProgram, point: &[Rational]) -> Result<bool> {
    if point.len() != lp.num_vars {
        return domain(format!(
            "point has {} entries, program has {} variables",
            point.len(),
            lp.num_vars
        ));
    }
    let bounds_ok = lp
        .lower_bounds
        .iter()
        .zip(point)
        .all(|(lb, x)| lb.as_ref().is_none_or(|l| x >= l));
    let rows_ok = lp
        .rows
        .iter()
        .all(|row| row.relation.holds(&dot(&row.coeffs, point), &row.rhs));
    Ok(bounds_ok && rows_ok)
}

/// Maps an original variable onto one or two nonnegative tableau columns.
enum ColumnMap {
    Shifted { col: usize, lower: Rational },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// `m` constraint rows followed by the reduced-cost row; the last entry
    /// of every row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let nonzero: Vec<usize> = (0..=self.width)
            .filter(|&k| !self.rows[r][k].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let factor = row[e].clone();
            for &k in &nonzero {
                let delta = &factor * &pivot_row[k];
                row[k] -= delta;
            }
        }
        self.basis[r] = e;
    }

    /// Installs `cost` as the reduced-cost row for the current basis.
    fn price(&mut self, cost: &[Rational]) {
        let m = self.m();
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(zero());
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (k, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    d[k] -= cb * v;
                }
            }
        }
        self.rows[m] = d;
    }

    /// Runs Bland-rule simplex on the installed cost row. Returns `false` on
    /// unboundedness.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let m = self.m();
        loop {
            let entering = (0..self.width).find(|&j| allowed[j] && self.rows[m][j].is_negative());
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }
}

/// Solves `lp` exactly. Programs without an objective report
/// [`LpStatus::Feasible`] with a witness point.
pub fn solve(lp: &LinearProgram) -> Result<LpResult> {
    lp.validate()?;

    let mut maps = Vec::with_capacity(lp.num_vars);
    let mut n_std = 0;
    for lb in &lp.lower_bounds {
        match lb {
            Some(l) => {
                maps.push(ColumnMap::Shifted {
                    col: n_std,
                    lower: l.clone(),
                });
                n_std += 1;
            }
            None => {
                maps.push(ColumnMap::Split {
                    pos: n_std,
                    neg: n_std + 1,
                });
                n_std += 2;
            }
        }
    }

    // Standard-form rows over the shifted/split columns with rhs >= 0.
    let mut std_rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for row in &lp.rows {
        let mut coeffs = vec![zero(); n_std];
        let mut rhs = row.rhs.clone();
        for (a, map) in row.coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            match map {
                ColumnMap::Shifted { col, lower } => {
                    coeffs[*col] = a.clone();
                    if !lower.is_zero() {
                        rhs -= a * lower;
                    }
                }
                ColumnMap::Split { pos, neg } => {
                    coeffs[*pos] = a.clone();
                    coeffs[*neg] = -a.clone();
                }
            }
        }
        if coeffs.iter().all(Zero::is_zero) {
            if !row.relation.holds(&zero(), &rhs) {
                return Ok(LpResult::bare(LpStatus::Infeasible));
            }
            continue;
        }
        let mut relation = row.relation;
        if rhs.is_negative() {
            coeffs.iter_mut().for_each(|c| *c = -c.clone());
            rhs = -rhs;
            relation = relation.flipped();
        }
        std_rows.push((coeffs, relation, rhs));
    }

    let m = std_rows.len();
    let n_slack = std_rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let n_art = std_rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let width = n_std + n_slack + n_art;
    let art_start = n_std + n_slack;

    let mut rows = Vec::with_capacity(m + 1);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n_std, art_start);
    for (coeffs, rel, rhs) in std_rows {
        let mut row = coeffs;
        row.resize(width + 1, zero());
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = crate::rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -crate::rational::one();
                next_slack += 1;
                row[next_art] = crate::rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = crate::rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    rows.push(vec![zero(); width + 1]);
    let mut t = Tableau { rows, basis, width };

    let mut allowed = vec![true; width];
    if n_art > 0 {
        let mut cost = vec![zero(); width];
        for c in cost.iter_mut().skip(art_start) {
            *c = crate::rational::one();
        }
        t.price(&cost);
        t.optimize(&allowed);
        let infeasibility: Rational = (0..t.m())
            .filter(|&i| t.basis[i] >= art_start)
            .fold(zero(), |acc, i| acc + t.rhs(i));
        if infeasibility.is_positive() {
            return Ok(LpResult::bare(LpStatus::Infeasible));
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linearly dependent and get dropped.
        let mut i = 0;
        while i < t.m() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        allowed
            .iter_mut()
            .skip(art_start)
            .for_each(|a| *a = false);
    }

    let mut status = LpStatus::Feasible;
    if let Some((c, sense)) = &lp.objective {
        let mut cost = vec![zero(); width];
        for (a, map) in c.iter().zip(&maps) {
            let a = match sense {
                Sense::Min => a.clone(),
                Sense::Max => -a.clone(),
            };
            match map {
                ColumnMap::Shifted { col, .. } => cost[*col] = a,
                ColumnMap::Split { pos, neg } => {
                    cost[*neg] = -a.clone();
                    cost[*pos] = a;
                }
            }
        }
        t.price(&cost);
        if !t.optimize(&allowed) {
            return Ok(LpResult::bare(LpStatus::Unbounded));
        }
        status = LpStatus::Optimal;
    }

    let mut std_values = vec![zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        std_values[b] = t.rhs(i).clone();
    }
    let point: Vec<Rational> = maps
        .iter()
        .map(|map| match map {
            ColumnMap::Shifted { col, lower } => lower + &std_values[*col],
            ColumnMap::Split { pos, neg } => &std_values[*pos] - &std_values[*neg],
        })
        .collect();
    let objective_value = lp.objective.as_ref().map(|(c, _)| dot(c, &point));
    Ok(LpResult {
        status,
        point: Some(point),
        objective_value: if status == LpStatus::Optimal {
            objective_value
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::new(1);
        lp.add_le(ints(&[1]), int(5));
        lp.maximize(ints(&[1]));
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.point.unwrap(), ints(&[5]));
        assert_eq!(res.objective_value.unwrap(), int(5));
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(ints(&[1, 1]), int(3));
        lp.add_ge(ints(&[1, 0]), int(2));
        lp.add_ge(ints(&[0, 1]), int(2));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn empty_program_is_rejected() {
        assert!(matches!(
            solve(&LinearProgram::new(0)),
            Err(crate::Error::Domain(_))
        ));
        let mut lp = LinearProgram::new(2);
        lp.add_le(ints(&[1]), int(1));
        assert!(solve(&lp).is_err());
    }

    #[test]
    fn unbounded_detection() {
        let mut lp = LinearProgram::new(2);
        lp.add_ge(ints(&[1, -1]), int(0));
        lp.maximize(ints(&[1, 1]));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_shifted_bounds() {
        // min x s.t. x >= -7/2 with x free.
        let mut lp = LinearProgram::new(1);
        lp.set_free(0);
        lp.add_ge(ints(&[1]), frac(-7, 2));
        lp.minimize(ints(&[1]));
        let res = solve(&lp).unwrap();
        assert_eq!(res.objective_value.unwrap(), frac(-7, 2));

        // min x + y with x >= 2 (bound), y >= -1 (bound), x + y >= 0.
        let mut lp = LinearProgram::new(2);
        lp.lower_bounds = vec![Some(int(2)), Some(int(-1))];
        lp.add_ge(ints(&[1, 1]), int(0));
        lp.minimize(ints(&[1, 1]));
        let res = solve(&lp).unwrap();
        assert_eq!(res.objective_value.unwrap(), int(1));
        assert!(assert_feasible_point(&lp, res.point.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn zero_rows_are_presolved() {
        let mut lp = LinearProgram::new(1);
        lp.add_le(ints(&[0]), int(1));
        lp.add_le(ints(&[1]), int(2));
        lp.maximize(ints(&[1]));
        assert_eq!(solve(&lp).unwrap().objective_value.unwrap(), int(2));

        let mut lp = LinearProgram::new(1);
        lp.add_ge(ints(&[0]), int(1));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(2);
        lp.add_eq(ints(&[1, 1]), int(2));
        lp.add_eq(ints(&[2, 2]), int(4));
        lp.maximize(ints(&[1, 0]));
        let res = solve(&lp).unwrap();
        assert_eq!(res.objective_value.unwrap(), int(2));
    }

    /// Beale's program cycles under the textbook largest-coefficient rule.
    #[test]
    fn degenerate_program_terminates() {
        let mut lp = LinearProgram::new(4);
        lp.add_le(vec![frac(1, 4), int(-8), int(-1), int(9)], int(0));
        lp.add_le(vec![frac(1, 2), int(-12), frac(-1, 2), int(3)], int(0));
        lp.add_le(ints(&[0, 0, 1, 0]), int(1));
        lp.minimize(vec![frac(-3, 4), int(20), frac(-1, 2), int(6)]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.objective_value.unwrap(), frac(-5, 4));
        assert!(assert_feasible_point(&lp, res.point.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn feasible_point_checks() {
        let mut lp = LinearProgram::new(1);
        lp.add_ge(ints(&[1]), int(1));
        assert!(assert_feasible_point(&lp, &[int(1)]).unwrap());
        assert!(!assert_feasible_point(&lp, &[frac(1, 2)]).unwrap());
        assert!(assert_feasible_point(&lp, &[]).is_err());
    }

    #[test]
    fn solves_are_deterministic() {
        let mut lp = LinearProgram::new(3);
        lp.add_le(ints(&[1, 1, 0]), int(1));
        lp.add_le(ints(&[1, 0, 1]), int(1));
        lp.add_le(ints(&[0, 1, 1]), int(1));
        lp.maximize(ints(&[1, 1, 1]));
        let a = solve(&lp).unwrap();
        let b = solve(&lp).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.objective_value.unwrap(), frac(3, 2));
    }
}

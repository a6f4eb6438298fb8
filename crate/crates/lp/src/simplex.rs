use std::cmp::Ordering;

use crate::{LpError, LpProblem, Relation, Scalar, Sense};

const PIVOT_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Identifies a basic column: a structural variable, or the slack (or
/// leftover artificial) attached to a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisMember {
    Variable(usize),
    Constraint(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: Status,
    pub values: Vec<S>,
    pub objective: S,
    /// Sorted; one member per constraint row.
    pub basis: Vec<BasisMember>,
    pub pivots: usize,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

/// True iff every value lies within `tol` of 0 or 1.
pub fn is_integral<S: Scalar>(sol: &LpSolution<S>, tol: &S) -> bool {
    let near = |v: &S, target: &S| {
        v.sub(target).is_ok_and(|d| {
            let mag = if d.is_negative() { d.neg() } else { d };
            mag.is_zero() || mag.cmp_tol(tol).is_ok_and(|o| o != Ordering::Greater)
        })
    };
    sol.values
        .iter()
        .all(|v| near(v, &S::zero()) || near(v, &S::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

enum Leave {
    Flip,
    Row { row: usize, to_upper: bool },
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    columns: Vec<Column>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    upper: Vec<Option<S>>,
    x: Vec<S>,
    cost: Vec<S>,
    reduced: Vec<S>,
    pivots: usize,
}

/// Solve `p` to a basic optimal solution (or report infeasible/unbounded).
pub fn solve<S: Scalar>(p: &LpProblem) -> Result<LpSolution<S>, LpError> {
    p.validate()?;
    let n = p.num_variables();
    let m = p.num_constraints();

    let lower: Vec<S> = p
        .variables
        .iter()
        .map(|v| S::from_rational(&v.lower))
        .collect::<Result<_, _>>()?;

    // Shifted rows a·x' (rel) b - a·l, normalised to a non-negative rhs.
    let mut dense_rows: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut rhs: Vec<S> = Vec::with_capacity(m);
    let mut slack_sign: Vec<Option<bool>> = Vec::with_capacity(m);
    for c in &p.constraints {
        let mut row = vec![S::zero(); n];
        for &(v, a) in &c.coeffs {
            let a = S::from_rational(&a)?;
            row[v] = row[v].add(&a)?;
        }
        let mut b = S::from_rational(&c.rhs)?;
        for (j, a) in row.iter().enumerate() {
            if !a.is_zero() && !lower[j].is_zero() {
                b = b.sub(&a.mul(&lower[j])?)?;
            }
        }
        let mut positive_slack = match c.relation {
            Relation::Le => Some(true),
            Relation::Ge => Some(false),
            Relation::Eq => None,
        };
        if b.is_negative() {
            for a in row.iter_mut() {
                *a = a.neg();
            }
            b = b.neg();
            positive_slack = positive_slack.map(|s| !s);
        }
        dense_rows.push(row);
        rhs.push(b);
        slack_sign.push(positive_slack);
    }

    let mut columns: Vec<Column> = (0..n).map(Column::Structural).collect();
    let mut slack_col = vec![None; m];
    for (r, s) in slack_sign.iter().enumerate() {
        if s.is_some() {
            slack_col[r] = Some(columns.len());
            columns.push(Column::Slack(r));
        }
    }
    let mut art_col = vec![None; m];
    for (r, s) in slack_sign.iter().enumerate() {
        if *s != Some(true) {
            art_col[r] = Some(columns.len());
            columns.push(Column::Artificial(r));
        }
    }
    let ncols = columns.len();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (r, mut row) in dense_rows.into_iter().enumerate() {
        row.resize(ncols, S::zero());
        if let (Some(col), Some(pos)) = (slack_col[r], slack_sign[r]) {
            row[col] = if pos { S::one() } else { S::one().neg() };
        }
        if let Some(col) = art_col[r] {
            row[col] = S::one();
            basis.push(col);
        } else {
            basis.push(slack_col[r].expect("row without artificial has a slack"));
        }
        rows.push(row);
    }

    let mut upper: Vec<Option<S>> = Vec::with_capacity(ncols);
    for (j, v) in p.variables.iter().enumerate() {
        upper.push(match v.upper {
            Some(u) => Some(S::from_rational(&u)?.sub(&lower[j])?),
            None => None,
        });
    }
    upper.resize(ncols, None);

    let mut x = vec![S::zero(); ncols];
    let mut is_basic = vec![false; ncols];
    for (r, &b) in basis.iter().enumerate() {
        x[b] = rhs[r].clone();
        is_basic[b] = true;
    }

    let mut tab = Tableau {
        rows,
        columns,
        basis,
        is_basic,
        at_upper: vec![false; ncols],
        upper,
        x,
        cost: vec![S::zero(); ncols],
        reduced: vec![S::zero(); ncols],
        pivots: 0,
    };

    // Phase 1: maximise -(sum of artificials).
    if art_col.iter().any(Option::is_some) {
        for j in 0..ncols {
            if matches!(tab.columns[j], Column::Artificial(_)) {
                tab.cost[j] = S::one().neg();
            }
        }
        tab.price()?;
        tab.run()?;
        let infeasible = (0..ncols)
            .filter(|&j| matches!(tab.columns[j], Column::Artificial(_)))
            .any(|j| tab.x[j].is_positive());
        if infeasible {
            return tab.finish(p, &lower, Status::Infeasible);
        }
        tab.retire_artificials()?;
    }

    // Phase 2.
    for c in tab.cost.iter_mut() {
        *c = S::zero();
    }
    for &(v, c) in &p.objective {
        let c = S::from_rational(&c)?;
        let c = match p.sense {
            Sense::Maximize => c,
            Sense::Minimize => c.neg(),
        };
        tab.cost[v] = tab.cost[v].add(&c)?;
    }
    tab.price()?;
    let status = if tab.run()? {
        Status::Optimal
    } else {
        Status::Unbounded
    };
    tab.finish(p, &lower, status)
}

impl<S: Scalar> Tableau<S> {
    fn price(&mut self) -> Result<(), LpError> {
        for j in 0..self.reduced.len() {
            if self.is_basic[j] {
                self.reduced[j] = S::zero();
                continue;
            }
            let mut d = self.cost[j].clone();
            for (r, &b) in self.basis.iter().enumerate() {
                let a = &self.rows[r][j];
                if !a.is_zero() && !self.cost[b].is_zero() {
                    d = d.sub(&self.cost[b].mul(a)?)?;
                }
            }
            self.reduced[j] = d;
        }
        Ok(())
    }

    fn movable(&self, j: usize) -> bool {
        match &self.upper[j] {
            Some(u) => !u.is_zero(),
            None => true,
        }
    }

    /// Bland's rule: the lowest-index improving column.
    fn entering(&self) -> Option<(usize, bool)> {
        (0..self.reduced.len()).find_map(|j| {
            if self.is_basic[j] || !self.movable(j) {
                return None;
            }
            let d = &self.reduced[j];
            if !self.at_upper[j] && d.is_positive() {
                Some((j, true))
            } else if self.at_upper[j] && d.is_negative() {
                Some((j, false))
            } else {
                None
            }
        })
    }

    /// Returns `Ok(true)` at optimality, `Ok(false)` if unbounded.
    fn run(&mut self) -> Result<bool, LpError> {
        loop {
            let Some((j, increase)) = self.entering() else {
                return Ok(true);
            };
            if self.pivots >= PIVOT_LIMIT {
                return Err(LpError::PivotLimit(PIVOT_LIMIT));
            }

            let mut best: Option<(S, usize, Leave)> = None;
            if let Some(u) = &self.upper[j] {
                best = Some((u.clone(), j, Leave::Flip));
            }
            for r in 0..self.rows.len() {
                let a = &self.rows[r][j];
                if a.is_zero() {
                    continue;
                }
                let b = self.basis[r];
                let da = if increase { a.clone() } else { a.neg() };
                let (theta, to_upper) = if da.is_positive() {
                    (self.x[b].div(&da)?, false)
                } else {
                    match &self.upper[b] {
                        Some(ub) => (ub.sub(&self.x[b])?.div(&da.neg())?, true),
                        None => continue,
                    }
                };
                let better = match &best {
                    None => true,
                    Some((t, key, _)) => match theta.cmp_tol(t)? {
                        Ordering::Less => true,
                        Ordering::Equal => b < *key,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((theta, b, Leave::Row { row: r, to_upper }));
                }
            }
            let Some((theta, _, leave)) = best else {
                return Ok(false);
            };

            if !theta.is_zero() {
                let step = if increase { theta.clone() } else { theta.neg() };
                self.x[j] = self.x[j].add(&step)?;
                for r in 0..self.rows.len() {
                    let a = &self.rows[r][j];
                    if !a.is_zero() {
                        let b = self.basis[r];
                        self.x[b] = self.x[b].sub(&a.mul(&step)?)?;
                    }
                }
            }
            match leave {
                Leave::Flip => {
                    self.at_upper[j] = increase;
                    self.x[j] = if increase {
                        self.upper[j].clone().expect("flip needs a finite bound")
                    } else {
                        S::zero()
                    };
                }
                Leave::Row { row, to_upper } => {
                    let b = self.basis[row];
                    self.x[b] = if to_upper {
                        self.upper[b].clone().expect("leaving at upper needs a bound")
                    } else {
                        S::zero()
                    };
                    self.at_upper[b] = to_upper;
                    self.pivot(row, j)?;
                }
            }
            self.pivots += 1;
        }
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        let p = self.rows[row][col].clone();
        let nz: Vec<usize> = (0..self.rows[row].len())
            .filter(|&c| !self.rows[row][c].is_zero())
            .collect();
        for &c in &nz {
            self.rows[row][c] = if c == col {
                S::one()
            } else {
                self.rows[row][c].div(&p)?
            };
        }
        let pivot_row = std::mem::take(&mut self.rows[row]);
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for &c in &nz {
                r[c] = r[c].sub(&f.mul(&pivot_row[c])?)?;
            }
            r[col] = S::zero();
        }
        let f = self.reduced[col].clone();
        if !f.is_zero() {
            for &c in &nz {
                self.reduced[c] = self.reduced[c].sub(&f.mul(&pivot_row[c])?)?;
            }
        }
        self.reduced[col] = S::zero();
        self.rows[row] = pivot_row;

        let leaving = self.basis[row];
        self.is_basic[leaving] = false;
        self.is_basic[col] = true;
        self.at_upper[col] = false;
        self.basis[row] = col;
        Ok(())
    }

    /// Fix artificials at zero and pivot basic ones out where a
    /// non-artificial column can replace them (degenerate pivots).
    fn retire_artificials(&mut self) -> Result<(), LpError> {
        for j in 0..self.columns.len() {
            if matches!(self.columns[j], Column::Artificial(_)) {
                self.upper[j] = Some(S::zero());
                if !self.is_basic[j] {
                    self.x[j] = S::zero();
                    self.at_upper[j] = false;
                }
            }
        }
        for r in 0..self.rows.len() {
            if !matches!(self.columns[self.basis[r]], Column::Artificial(_)) {
                continue;
            }
            let replacement = (0..self.columns.len()).find(|&c| {
                !self.is_basic[c]
                    && !matches!(self.columns[c], Column::Artificial(_))
                    && !self.rows[r][c].is_zero()
            });
            if let Some(c) = replacement {
                // Degenerate: the entering column keeps its current value.
                let leaving = self.basis[r];
                self.x[leaving] = S::zero();
                self.at_upper[leaving] = false;
                self.pivot(r, c)?;
                self.pivots += 1;
            }
        }
        Ok(())
    }

    fn finish(
        &self,
        p: &LpProblem,
        lower: &[S],
        status: Status,
    ) -> Result<LpSolution<S>, LpError> {
        let n = p.num_variables();
        let mut values = Vec::with_capacity(n);
        for (x, lo) in self.x[..n].iter().zip(lower) {
            values.push(x.add(lo)?);
        }
        let mut objective = S::zero();
        for &(v, c) in &p.objective {
            objective = objective.add(&S::from_rational(&c)?.mul(&values[v])?)?;
        }
        let mut basis: Vec<BasisMember> = self
            .basis
            .iter()
            .map(|&b| match self.columns[b] {
                Column::Structural(v) => BasisMember::Variable(v),
                Column::Slack(r) | Column::Artificial(r) => BasisMember::Constraint(r),
            })
            .collect();
        basis.sort();
        Ok(LpSolution {
            status,
            values,
            objective,
            basis,
            pivots: self.pivots,
        })
    }
}

use num_traits::Zero;

use crate::{LpError, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// A decision variable with a finite lower bound and optional upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: Rational,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Sparse row as `(variable index, coefficient)`.
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A general linear program over rational data.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Sparse objective as `(variable index, coefficient)`.
    pub objective: Vec<(usize, Rational)>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
        }
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: Rational,
        upper: Option<Rational>,
    ) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs,
            relation,
            rhs,
        });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        if let Some(slot) = self.objective.iter_mut().find(|(v, _)| *v == var) {
            slot.1 = coeff;
        } else {
            self.objective.push((var, coeff));
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (i, v) in self.variables.iter().enumerate() {
            if let Some(u) = v.upper {
                if u < v.lower {
                    return Err(LpError::InvalidBounds { variable: i });
                }
            }
        }
        for (c, row) in self.constraints.iter().enumerate() {
            if let Some(&(v, _)) = row.coeffs.iter().find(|(v, _)| *v >= self.variables.len()) {
                return Err(LpError::UnknownVariable {
                    constraint: Some(c),
                    variable: v,
                });
            }
        }
        if let Some(&(v, _)) = self
            .objective
            .iter()
            .find(|(v, _)| *v >= self.variables.len())
        {
            return Err(LpError::UnknownVariable {
                constraint: None,
                variable: v,
            });
        }
        Ok(())
    }

    /// Objective value of an arbitrary assignment.
    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        self.objective
            .iter()
            .fold(Rational::zero(), |acc, &(v, c)| acc + c * values[v])
    }

    /// First constraint or bound violated by `values`, if any.
    pub fn first_violation(&self, values: &[Rational]) -> Option<String> {
        for (i, v) in self.variables.iter().enumerate() {
            let x = values[i];
            if x < v.lower || v.upper.is_some_and(|u| x > u) {
                return Some(format!("variable {} = {} out of bounds", v.name, x));
            }
        }
        for c in &self.constraints {
            let lhs = c
                .coeffs
                .iter()
                .fold(Rational::zero(), |acc, &(v, a)| acc + a * values[v]);
            let ok = match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            };
            if !ok {
                return Some(format!("constraint {}: lhs {} vs rhs {}", c.name, lhs, c.rhs));
            }
        }
        None
    }
}

//! Bounded-variable primal simplex that returns *basic* optimal solutions.
//!
//! Two backends share one implementation: exact rationals ([`Rational`],
//! `i128` numerator/denominator with overflow detection) and `f64`. Pivoting
//! follows Bland's rule throughout, so runs are deterministic and never cycle.

mod export;
mod problem;
mod scalar;
mod simplex;

pub use export::write_lp_format;
pub use problem::{Constraint, LpProblem, Relation, Sense, Variable};
pub use scalar::{Scalar, FLOAT_EPS};
pub use simplex::{is_integral, solve, BasisMember, LpSolution, Status};

/// Exact rational number used for all problem data.
pub type Rational = num_rational::Ratio<i128>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("variable {variable} referenced by {} does not exist", match .constraint { Some(c) => format!("constraint {c}"), None => "the objective".to_string() })]
    UnknownVariable {
        constraint: Option<usize>,
        variable: usize,
    },
    #[error("variable {variable} has upper bound below lower bound")]
    InvalidBounds { variable: usize },
    #[error("rational coefficient overflow during pivoting")]
    Overflow,
    #[error("pivot limit of {0} exceeded")]
    PivotLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Rational,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(Backend::Rational),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected rational or float)")),
        }
    }
}

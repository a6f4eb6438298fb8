//! Exact solvers and the schedule validator.

mod brute;
mod fpt;
mod validate;

pub use brute::{brute_force_optimal, enumerate_optimal, Caps};
pub use fpt::fpt_exact;
pub use validate::{validate_schedule, Violation};

use serde::Serialize;

use crate::schedule::Schedule;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SearchStats {
    /// DP states or enumeration leaves visited.
    pub explored: u64,
    /// Largest DP frontier, or the number of LP variables for the FPT solver.
    pub peak: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: Rational,
    pub witness: Schedule,
    /// Number of optimal antenna assignments, when the solver counts them.
    pub optimal_count: Option<u64>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search exceeded the {what} cap of {limit}")]
    CapExceeded { what: &'static str, limit: u64 },
    #[error("{antennae} antennae exceed the {channels} channels")]
    TooManyAntennae { antennae: usize, channels: usize },
    #[error("LP solver: {0}")]
    Lp(#[from] alwdr_lp::LpError),
    #[error("LP finished with status {0:?}")]
    LpStatus(alwdr_lp::Status),
    #[error("basic optimum of the penalty LP is fractional")]
    NonIntegral,
    #[error("path decoding: {0}")]
    Dag(#[from] crate::dag::DagError),
}

//! End-to-end solving: the phase pipeline, benchmarking and gap search.

mod bench;
mod gap;
mod threedm;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use alwdr_lp::{solve, LpError, LpSolution, Status};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dag::build_basic_dag;
use crate::formulations::{build_edge_lp, build_path_lp, enumerate_segment_paths, PathCapExceeded};
use crate::instance::{
    format_rational, insert_vacant_slots, phase_count, segment_map, serialize_instance, Instance, InstanceError,
};
use crate::oracle::{validate_schedule, Caps, OracleError, Violation};
use crate::rounding::{decompose_flow, derandomize, round_flows_collective, round_paths_randomized, RandomSource, RoundingError};
use crate::schedule::Schedule;
use crate::Rational;

pub use bench::{bench, summarize, write_report, BenchSpec, CSV_HEADER};
pub use gap::{gap_search, GapReport, GapWitness};
pub use threedm::{has_perfect_matching, matching_free_3dm, planted_3dm, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Algorithm {
    /// Edge-LP optimum only; reported weight is the LP value.
    Lp,
    PathRounding,
    Collective,
    Derandomized,
    /// Exact optimum through the improved DAG.
    Fpt,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Lp => "lp",
            Algorithm::PathRounding => "path-rounding",
            Algorithm::Collective => "collective",
            Algorithm::Derandomized => "derandomized",
            Algorithm::Fpt => "fpt",
        }
    }

    pub fn is_rounding(self) -> bool {
        matches!(self, Algorithm::PathRounding | Algorithm::Collective | Algorithm::Derandomized)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Algorithm::Lp,
            Algorithm::PathRounding,
            Algorithm::Collective,
            Algorithm::Derandomized,
            Algorithm::Fpt,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DriverError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("LP solver: {0}")]
    Lp(#[from] LpError),
    #[error("LP finished with status {0:?}")]
    LpStatus(Status),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    PathCap(#[from] PathCapExceeded),
    #[error("emitted schedule is invalid: {0}")]
    Invalid(#[from] Violation),
    #[error("{0}")]
    Unsupported(String),
}

impl DriverError {
    /// True when a configured resource limit stopped the run.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            DriverError::PathCap(_) | DriverError::Oracle(OracleError::CapExceeded { .. })
        ) || matches!(self, DriverError::Rounding(RoundingError::TooManySets { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriverCaps {
    /// Paths enumerated over all segments for path rounding.
    pub paths: usize,
    pub oracle: Caps,
    /// Bound on 2^B·|E| for the FPT solver.
    pub fpt: u64,
}

impl Default for DriverCaps {
    fn default() -> Self {
        Self {
            paths: 200_000,
            oracle: Caps::default(),
            fpt: 1 << 22,
        }
    }
}

/// One row of a benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub digest: String,
    pub algorithm: String,
    pub delta: usize,
    pub gamma: usize,
    pub eps: Option<String>,
    pub seed: u64,
    pub lp_value: Option<String>,
    pub weight: Option<String>,
    pub oracle: Option<String>,
    pub ratio_lp: Option<f64>,
    pub ratio_oracle: Option<f64>,
    pub wall_ms: f64,
    /// Per-phase weights separated by `;`.
    pub phase_weights: String,
    pub error: Option<String>,
}

/// Hex SHA-256 of the instance's text serialization.
pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(serialize_instance(inst).as_bytes()))
}

pub(crate) fn ratio(num: &Rational, den: &Rational) -> f64 {
    if den.is_zero() {
        1.0
    } else {
        (num / den).to_f64().unwrap_or(f64::NAN)
    }
}

fn optimal(sol: LpSolution<Rational>) -> Result<LpSolution<Rational>, DriverError> {
    match sol.status {
        Status::Optimal => Ok(sol),
        s => Err(DriverError::LpStatus(s)),
    }
}

/// Exact edge-LP optimum on the basic DAG.
pub fn edge_lp_value(inst: &Instance, delta: usize) -> Result<Rational, DriverError> {
    let lp = build_edge_lp(&build_basic_dag(inst), delta);
    Ok(optimal(solve(&lp.problem)?)?.objective)
}

/// Runs one rounding algorithm on the instance's own segments.
/// Returns the schedule and the LP value it was rounded from.
pub fn round_once(
    inst: &Instance,
    algorithm: Algorithm,
    rng: &mut RandomSource,
    caps: &DriverCaps,
) -> Result<(Schedule, Rational), DriverError> {
    let delta = inst.antennae();
    let schedule_and_lp = match algorithm {
        Algorithm::PathRounding => {
            let paths = enumerate_segment_paths(inst, &segment_map(inst), caps.paths)?;
            let lp = build_path_lp(inst, &paths, delta);
            let sol = optimal(solve(&lp.problem)?)?;
            let s = round_paths_randomized(&paths, &lp.split(&sol.values), delta, rng)?;
            (s, sol.objective)
        }
        Algorithm::Collective | Algorithm::Derandomized => {
            let g = build_basic_dag(inst);
            let lp = build_edge_lp(&g, delta);
            let sol = optimal(solve(&lp.problem)?)?;
            let x = lp.edge_values(&sol.values);
            let d = decompose_flow(&g, x, delta)?;
            let s = if algorithm == Algorithm::Collective {
                round_flows_collective(&d, &g, rng)?
            } else {
                derandomize(&d, &g, x)?
            };
            (s, sol.objective)
        }
        other => return Err(DriverError::Unsupported(format!("{other} is not a rounding algorithm"))),
    };
    validate_schedule(inst, &schedule_and_lp.0)?;
    Ok(schedule_and_lp)
}

/// Best schedule over all phases of the vacant-slot transformation.
///
/// Phase i clears slots i + j·⌈1/ε⌉ and rounds the resulting γ-separated
/// instance. The highest-weight phase wins, ties to the earliest. Without
/// `eps` the instance is rounded as given. The returned schedule is
/// validated against `inst`.
pub fn approximate_alwdr(
    inst: &Instance,
    eps: Option<&Rational>,
    algorithm: Algorithm,
    seed: u64,
    caps: &DriverCaps,
) -> Result<(Schedule, RunRecord), DriverError> {
    if !algorithm.is_rounding() {
        return Err(DriverError::Unsupported(format!("{algorithm} is not a rounding algorithm")));
    }
    let start = Instant::now();
    let mut rng = RandomSource::new(seed);
    let phases: Vec<Instance> = match eps {
        Some(e) => (1..=phase_count(e)?)
            .map(|i| insert_vacant_slots(inst, e, i))
            .collect::<Result<_, _>>()?,
        None => vec![inst.clone()],
    };
    let mut best: Option<(Rational, Schedule)> = None;
    let mut phase_weights = Vec::with_capacity(phases.len());
    let mut gamma = 0;
    for phase in &phases {
        gamma = gamma.max(segment_map(phase).gamma());
        let (s, _) = round_once(phase, algorithm, &mut rng, caps)?;
        let w = s.weight(inst);
        phase_weights.push(format_rational(&w));
        if best.as_ref().is_none_or(|(b, _)| w > *b) {
            best = Some((w, s));
        }
    }
    let (weight, schedule) = best.expect("at least one phase");
    validate_schedule(inst, &schedule)?;
    let lp = edge_lp_value(inst, inst.antennae())?;
    let record = RunRecord {
        instance: String::new(),
        digest: instance_digest(inst),
        algorithm: algorithm.name().to_string(),
        delta: inst.antennae(),
        gamma,
        eps: eps.map(format_rational),
        seed,
        lp_value: Some(format_rational(&lp)),
        weight: Some(format_rational(&weight)),
        oracle: None,
        ratio_lp: Some(ratio(&weight, &lp)),
        ratio_oracle: None,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        phase_weights: phase_weights.join(";"),
        error: None,
    };
    Ok((schedule, record))
}

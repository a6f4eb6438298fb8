//! Rounding of fractional LP optima into schedules.

mod collective;
mod decompose;
mod derandomize;
mod paths;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Occurrence;
use crate::schedule::Schedule;
use crate::Rational;

pub use collective::round_flows_collective;
pub use decompose::{decompose_flow, FlowDecomposition, SegmentFlows, Subflow};
pub use derandomize::derandomize;
pub use paths::round_paths_randomized;

/// Largest number of candidate sets examined for one segment.
const MAX_CANDIDATE_SETS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoundingError {
    #[error("flow is not conserved at vertex {vertex}")]
    NonConserving { vertex: usize },
    #[error("segment {segment} receives more than the antenna count in flow")]
    ExcessFlow { segment: usize },
    #[error("solution does not match the path family: {0}")]
    Mismatch(String),
    #[error("segment {segment} has no admissible candidate set")]
    NoCandidateSet { segment: usize },
    #[error("segment {segment} has more than {limit} candidate sets")]
    TooManySets { segment: usize, limit: usize },
}

/// Seeded generator; one seed always yields the same decision stream.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index drawn with probability proportional to `masses`.
    /// Returns `None` when every mass is zero.
    pub fn pick(&mut self, masses: &[Rational]) -> Option<usize> {
        let total: Rational = masses.iter().sum();
        if total <= Rational::zero() {
            return None;
        }
        let u: f64 = self.rng.gen();
        let mut acc = Rational::zero();
        let mut last = None;
        for (i, m) in masses.iter().enumerate() {
            if *m <= Rational::zero() {
                continue;
            }
            acc += m;
            last = Some(i);
            if u < (acc / total).to_f64().unwrap_or(1.0) {
                return Some(i);
            }
        }
        last
    }
}

/// Samples up to `delta` pairwise compatible candidates.
///
/// Each admissible set S (|S| ≤ δ, members pairwise compatible, positive
/// values) is padded with δ − |S| idle members of value `idle` (the idle mass
/// per antenna) and drawn with probability proportional to its member total.
/// For δ = 1 this picks candidate j with probability `values[j]` and nothing
/// with probability `idle`.
pub(crate) fn sample_set(
    segment: usize,
    values: &[Rational],
    idle: Rational,
    delta: usize,
    compatible: impl Fn(usize, usize) -> bool,
    rng: &mut RandomSource,
) -> Result<Vec<usize>, RoundingError> {
    let live: Vec<usize> = (0..values.len()).filter(|&j| values[j] > Rational::zero()).collect();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut masses = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        live: &[usize],
        delta: usize,
        compatible: &dyn Fn(usize, usize) -> bool,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> bool {
        out.push(stack.clone());
        if out.len() > MAX_CANDIDATE_SETS {
            return false;
        }
        if stack.len() == delta {
            return true;
        }
        for k in start..live.len() {
            let j = live[k];
            if stack.iter().all(|&i| compatible(i, j)) {
                stack.push(j);
                let ok = walk(k + 1, live, delta, compatible, stack, out);
                stack.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    if !walk(0, &live, delta, &compatible, &mut stack, &mut sets) {
        return Err(RoundingError::TooManySets {
            segment,
            limit: MAX_CANDIDATE_SETS,
        });
    }
    for s in &sets {
        let pad = Rational::from_integer((delta - s.len()) as i128) * idle;
        masses.push(s.iter().map(|&j| values[j]).sum::<Rational>() + pad);
    }
    let k = rng.pick(&masses).ok_or(RoundingError::NoCandidateSet { segment })?;
    Ok(std::mem::take(&mut sets[k]))
}

/// Concatenates per-segment selections: the k-th pick of every segment goes
/// to antenna k. Segments are separated by vacant slots, so any channel
/// switch between them is allowed.
pub(crate) fn assemble(delta: usize, picks: Vec<Vec<Vec<Occurrence>>>) -> Schedule {
    let mut s = Schedule::empty(delta);
    for segment in picks {
        for (a, seq) in segment.into_iter().enumerate() {
            s.antennas[a].extend(seq);
        }
    }
    s
}

use num_traits::Zero;

use super::{assemble, sample_set, RandomSource, RoundingError};
use crate::formulations::SegmentPaths;
use crate::schedule::Schedule;
use crate::Rational;

/// Picks paths per segment at random according to a path-LP solution.
///
/// `values[h][j]` is the LP value of path j of segment h (as returned by
/// `PathLp::split`). With δ = 1 exactly one path per segment is chosen with
/// probability equal to its value; with δ > 1 a set of pairwise cell-disjoint
/// paths is drawn (see [`sample_set`]), the empty path acting as idle mass.
pub fn round_paths_randomized(
    paths: &SegmentPaths,
    values: &[Vec<Rational>],
    delta: usize,
    rng: &mut RandomSource,
) -> Result<Schedule, RoundingError> {
    if values.len() != paths.segments.len() {
        return Err(RoundingError::Mismatch(format!(
            "{} segments of values for {} path families",
            values.len(),
            paths.segments.len()
        )));
    }
    let mut picks = Vec::with_capacity(values.len());
    for (h, (family, x)) in paths.segments.iter().zip(values).enumerate() {
        if family.len() != x.len() {
            return Err(RoundingError::Mismatch(format!(
                "segment {h}: {} values for {} paths",
                x.len(),
                family.len()
            )));
        }
        let mut idle = Rational::zero();
        let mut cand = x.clone();
        for (j, p) in family.iter().enumerate() {
            if p.is_empty() {
                idle += x[j];
                cand[j] = Rational::zero();
            }
        }
        let chosen = sample_set(
            h,
            &cand,
            idle / Rational::from_integer(delta as i128),
            delta,
            |a, b| !family[a].shares_cell(&family[b]),
            rng,
        )?;
        picks.push(chosen.into_iter().map(|j| family[j].occurrences.clone()).collect());
    }
    Ok(assemble(delta, picks))
}

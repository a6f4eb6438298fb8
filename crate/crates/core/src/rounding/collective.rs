use super::{assemble, sample_set, FlowDecomposition, RandomSource, RoundingError};
use crate::dag::Dag;
use crate::schedule::Schedule;
use crate::Rational;

/// Picks whole subflows per segment at random.
///
/// With δ = 1 subflow j is chosen with probability equal to its value and
/// nothing with the segment's idle mass. With δ > 1 a set of pairwise
/// disjoint subflows is drawn (see [`super::sample_set`]).
pub fn round_flows_collective(
    decomp: &FlowDecomposition,
    g: &Dag,
    rng: &mut RandomSource,
) -> Result<Schedule, RoundingError> {
    let delta = decomp.delta;
    let mut picks = Vec::with_capacity(decomp.segments.len());
    for (h, seg) in decomp.segments.iter().enumerate() {
        let values: Vec<Rational> = seg.subflows.iter().map(|f| f.value).collect();
        let chosen = sample_set(
            h,
            &values,
            seg.idle / Rational::from_integer(delta as i128),
            delta,
            |a, b| seg.subflows[a].disjoint(&seg.subflows[b]),
            rng,
        )?;
        picks.push(
            chosen
                .into_iter()
                .map(|j| seg.subflows[j].occurrences.iter().map(|&q| g.occurrences[q]).collect())
                .collect(),
        );
    }
    Ok(assemble(delta, picks))
}

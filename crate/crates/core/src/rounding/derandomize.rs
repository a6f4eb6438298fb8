use std::collections::BTreeSet;

use num_traits::Zero;

use super::{assemble, FlowDecomposition, RoundingError, Subflow};
use crate::dag::Dag;
use crate::schedule::Schedule;
use crate::Rational;

/// Deterministic counterpart of [`super::round_flows_collective`].
///
/// Segments are fixed in order. A candidate (a subflow or staying idle) is
/// scored as the weight of the items it newly covers plus the LP mass
/// w(e)·x_e of retrieving edges in later segments whose item is still
/// uncovered. The best score wins; ties go to the lowest subflow index and
/// idle ranks after every subflow.
///
/// With δ > 1 this runs δ passes over the segments, each adding one subflow
/// per segment that is disjoint from the subflows already chosen there.
pub fn derandomize(decomp: &FlowDecomposition, g: &Dag, values: &[Rational]) -> Result<Schedule, RoundingError> {
    if values.len() != g.num_edges() {
        return Err(RoundingError::Mismatch(format!(
            "{} values for {} edges",
            values.len(),
            g.num_edges()
        )));
    }
    let segs = decomp.segments.len();
    // later[h]: (item, w(e)·x_e) over retrieving edges in segments after h.
    let mut later: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); segs];
    for e in g.edges.iter().filter(|e| e.retrieves()) {
        let (Some(item), Some(s)) = (e.item, e.segment) else {
            continue;
        };
        let mass = e.weight * values[e.id];
        if mass.is_zero() {
            continue;
        }
        for entry in later.iter_mut().take(s) {
            entry.push((item, mass));
        }
    }

    let mut weights = vec![Rational::zero(); g.num_items + 1];
    for e in g.edges.iter().filter(|e| e.retrieves()) {
        if let Some(i) = e.item {
            weights[i] = e.weight;
        }
    }
    let items_of = |f: &Subflow| -> BTreeSet<usize> { f.occurrences.iter().map(|&q| g.occurrences[q].item).collect() };
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); segs];
    for _ in 0..decomp.delta {
        for (h, seg) in decomp.segments.iter().enumerate() {
            let residual = |extra: &BTreeSet<usize>| -> Rational {
                later[h]
                    .iter()
                    .filter(|(i, _)| !covered.contains(i) && !extra.contains(i))
                    .map(|(_, m)| *m)
                    .sum()
            };
            let mut best: Option<(Rational, Option<usize>)> = None;
            for (j, f) in seg.subflows.iter().enumerate() {
                if chosen[h].contains(&j) || !chosen[h].iter().all(|&k| seg.subflows[k].disjoint(f)) {
                    continue;
                }
                let new: BTreeSet<usize> = items_of(f).difference(&covered).copied().collect();
                let gain: Rational = new.iter().map(|&i| weights[i]).sum();
                let z = gain + residual(&new);
                if best.as_ref().is_none_or(|(b, _)| z > *b) {
                    best = Some((z, Some(j)));
                }
            }
            let idle = residual(&BTreeSet::new());
            if best.as_ref().is_none_or(|(b, _)| idle > *b) {
                best = Some((idle, None));
            }
            if let Some((_, Some(j))) = best {
                covered.extend(items_of(&seg.subflows[j]));
                chosen[h].push(j);
            }
        }
    }

    let picks = decomp
        .segments
        .iter()
        .zip(chosen)
        .map(|(seg, js)| {
            js.into_iter()
                .map(|j| seg.subflows[j].occurrences.iter().map(|&q| g.occurrences[q]).collect())
                .collect()
        })
        .collect();
    Ok(assemble(decomp.delta, picks))
}

use num_traits::One;
use rayon::prelude::*;

use super::{edge_lp_value, DriverError};
use crate::instance::{Instance, Occurrence};
use crate::oracle::{brute_force_optimal, Caps};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct GapWitness {
    pub instance: Instance,
    pub lp: Rational,
    pub optimum: Rational,
    /// LP value over optimum.
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub best: Option<GapWitness>,
    pub examined: usize,
    /// The cap stopped the enumeration before the space was exhausted.
    pub partial: bool,
}

/// Enumerates unit-weight, single-antenna instances on two channels with
/// 1..=`max_slots` slots where every item is broadcast at most
/// `max_occurrences` times, and returns the one maximizing edge-LP value
/// over optimum.
///
/// Instances are generated in order of slot count, then cell labelling with
/// items numbered by first appearance. At most `cap` instances are examined.
/// Ties keep the earliest instance, so the result is reproducible.
pub fn gap_search(max_slots: usize, max_occurrences: usize, cap: usize) -> Result<GapReport, DriverError> {
    let mut labellings: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut partial = false;
    for slots in 1..=max_slots {
        let mut cells = vec![0usize; 2 * slots];
        if !label_cells(0, &mut cells, &mut Vec::new(), max_occurrences, slots, cap, &mut labellings) {
            partial = true;
            break;
        }
    }
    let examined = labellings.len();
    let results: Vec<Result<(Rational, Rational, Instance), DriverError>> = labellings
        .par_iter()
        .map(|(slots, cells)| {
            let inst = from_cells(*slots, cells)?;
            let lp = edge_lp_value(&inst, 1)?;
            let opt = brute_force_optimal(&inst, 1, &Caps::default())?.optimum;
            Ok((lp, opt, inst))
        })
        .collect();
    let mut best: Option<GapWitness> = None;
    for r in results {
        let (lp, optimum, instance) = r?;
        let ratio = lp / optimum;
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(GapWitness {
                instance,
                lp,
                optimum,
                ratio,
            });
        }
    }
    Ok(GapReport {
        best,
        examined,
        partial,
    })
}

/// Fills cells from `pos` on with labels 0 (empty) or 1..=fresh, each label
/// used at most `limit` times. Returns false once `cap` labellings are collected and
/// another one is found.
fn label_cells(
    pos: usize,
    cells: &mut Vec<usize>,
    counts: &mut Vec<usize>,
    limit: usize,
    slots: usize,
    cap: usize,
    out: &mut Vec<(usize, Vec<usize>)>,
) -> bool {
    if pos == cells.len() {
        if counts.is_empty() {
            return true;
        }
        if out.len() == cap {
            return false;
        }
        out.push((slots, cells.clone()));
        return true;
    }
    let fresh = counts.len() + 1;
    for label in 0..=fresh {
        if label == fresh {
            if limit == 0 {
                break;
            }
            counts.push(1);
        } else if label > 0 {
            if counts[label - 1] == limit {
                continue;
            }
            counts[label - 1] += 1;
        }
        cells[pos] = label;
        let ok = label_cells(pos + 1, cells, counts, limit, slots, cap, out);
        if label == fresh {
            counts.pop();
        } else if label > 0 {
            counts[label - 1] -= 1;
        }
        if !ok {
            cells[pos] = 0;
            return false;
        }
    }
    cells[pos] = 0;
    true
}

/// Cells are ordered by slot, then channel; label 0 leaves a cell empty.
fn from_cells(slots: usize, cells: &[usize]) -> Result<Instance, DriverError> {
    let n = cells.iter().copied().max().unwrap_or(0);
    let occ = cells
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0)
        .map(|(k, &l)| Occurrence::new(l, 1 + k % 2, 1 + k / 2));
    Ok(Instance::new(vec![Rational::one(); n], 2, slots, 1, occ)?)
}

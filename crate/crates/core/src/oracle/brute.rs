use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{OracleError, OracleResult, SearchStats};
use crate::instance::{Instance, Occurrence};
use crate::schedule::Schedule;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest DP frontier (distinct states after one slot).
    pub max_states: u64,
    /// Largest number of complete schedules the raw enumerator may visit.
    pub max_enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_states: 2_000_000,
            max_enumeration: 10_000_000,
        }
    }
}

/// Per-antenna picks as (slot, channel).
type Witness = Vec<Vec<(usize, usize)>>;

#[derive(Debug, Clone)]
struct Entry {
    weight: Rational,
    /// Antenna witnesses aligned with the state's antenna list.
    witness: Witness,
}

/// Antenna positions (0 = free, c = retrieved on channel c in the previous
/// slot) sorted ascending, and retrieved items that are broadcast again.
type Key = (Vec<usize>, Vec<usize>);

fn better(a: &Entry, b: &Entry) -> bool {
    a.weight > b.weight || (a.weight == b.weight && a.witness < b.witness)
}

fn canonical(mut antennas: Vec<(usize, Vec<(usize, usize)>)>, covered: Vec<usize>) -> (Key, Witness) {
    antennas.sort();
    let states = antennas.iter().map(|(s, _)| *s).collect();
    let witness = antennas.into_iter().map(|(_, w)| w).collect();
    ((states, covered), witness)
}

fn to_schedule(inst: &Instance, witness: Witness) -> Schedule {
    let mut antennas: Vec<Vec<Occurrence>> = witness
        .into_iter()
        .map(|seq| {
            seq.into_iter()
                .map(|(slot, channel)| {
                    Occurrence::new(inst.item_at(channel, slot).expect("witness cell is occupied"), channel, slot)
                })
                .collect()
        })
        .collect();
    antennas.sort_by_key(|seq| (seq.is_empty(), seq.iter().map(Occurrence::cell).collect::<Vec<_>>()));
    Schedule { antennas }
}

/// Exact optimum by dynamic programming over slots.
///
/// The state records, per antenna, whether it retrieved in the previous slot
/// and on which channel, plus the retrieved items that are broadcast again
/// later. Ties keep the lexicographically smaller witness.
pub fn brute_force_optimal(inst: &Instance, delta: usize, caps: &Caps) -> Result<OracleResult, OracleError> {
    if delta > inst.channels() {
        return Err(OracleError::TooManyAntennae {
            antennae: delta,
            channels: inst.channels(),
        });
    }
    let mut last_slot: HashMap<usize, usize> = HashMap::new();
    for o in inst.occurrences() {
        last_slot.insert(o.item, o.slot);
    }

    let mut frontier: BTreeMap<Key, Entry> = BTreeMap::new();
    frontier.insert(
        (vec![0; delta], Vec::new()),
        Entry {
            weight: Rational::zero(),
            witness: vec![Vec::new(); delta],
        },
    );
    let mut stats = SearchStats::default();

    for slot in 1..=inst.slots() {
        let cells: Vec<(usize, usize)> = inst
            .occurrences()
            .iter()
            .filter(|o| o.slot == slot)
            .map(|o| (o.channel, o.item))
            .collect();
        let mut next: BTreeMap<Key, Entry> = BTreeMap::new();
        for ((states, covered), entry) in &frontier {
            let mut choice = vec![None; delta];
            expand(
                &cells,
                states,
                &mut choice,
                0,
                &mut |choice: &[Choice]| {
                    stats.explored += 1;
                    let mut cov = covered.clone();
                    let mut weight = entry.weight;
                    let mut antennas = Vec::with_capacity(delta);
                    for (a, pick) in choice.iter().enumerate() {
                        let mut seq = entry.witness[a].clone();
                        let state = match pick {
                            Some((channel, item)) => {
                                if let Err(pos) = cov.binary_search(item) {
                                    cov.insert(pos, *item);
                                    weight += inst.weight(*item);
                                }
                                seq.push((slot, *channel));
                                *channel
                            }
                            None => 0,
                        };
                        antennas.push((state, seq));
                    }
                    cov.retain(|i| last_slot[i] > slot);
                    let (key, witness) = canonical(antennas, cov);
                    let cand = Entry { weight, witness };
                    match next.get(&key) {
                        Some(old) if !better(&cand, old) => {}
                        _ => {
                            next.insert(key, cand);
                        }
                    }
                },
            );
        }
        if next.len() as u64 > caps.max_states {
            return Err(OracleError::CapExceeded {
                what: "DP state",
                limit: caps.max_states,
            });
        }
        stats.peak = stats.peak.max(next.len() as u64);
        frontier = next;
    }

    let best = frontier
        .into_values()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("frontier is never empty");
    Ok(OracleResult {
        optimum: best.weight,
        witness: to_schedule(inst, best.witness),
        optimal_count: None,
        stats,
    })
}

/// Per-antenna pick in one slot: `(channel, item)` or nothing.
type Choice = Option<(usize, usize)>;

/// Enumerates every per-antenna choice for this slot.
fn expand(
    cells: &[(usize, usize)],
    states: &[usize],
    choice: &mut Vec<Choice>,
    a: usize,
    emit: &mut dyn FnMut(&[Choice]),
) {
    if a == states.len() {
        emit(choice);
        return;
    }
    choice[a] = None;
    expand(cells, states, choice, a + 1, emit);
    for &(channel, item) in cells {
        let reachable = states[a] == 0 || states[a] == channel;
        let free = choice[..a].iter().all(|c| c.map(|(ch, _)| ch) != Some(channel));
        if reachable && free {
            choice[a] = Some((channel, item));
            expand(cells, states, choice, a + 1, emit);
        }
    }
    choice[a] = None;
}

/// Exhaustive enumeration of every δ-antenna schedule, counting the optimal
/// ones. Antennae are distinguishable, so symmetric assignments count
/// separately.
pub fn enumerate_optimal(inst: &Instance, delta: usize, caps: &Caps) -> Result<OracleResult, OracleError> {
    if delta > inst.channels() {
        return Err(OracleError::TooManyAntennae {
            antennae: delta,
            channels: inst.channels(),
        });
    }
    struct Search<'a> {
        inst: &'a Instance,
        cap: u64,
        leaves: u64,
        best: Rational,
        count: u64,
        witness: Witness,
        counts: HashMap<usize, usize>,
        weight: Rational,
    }
    impl Search<'_> {
        fn go(&mut self, slot: usize, states: &mut Vec<usize>, picks: &mut Witness) -> Result<(), OracleError> {
            if slot > self.inst.slots() {
                self.leaves += 1;
                if self.leaves > self.cap {
                    return Err(OracleError::CapExceeded {
                        what: "enumeration",
                        limit: self.cap,
                    });
                }
                if self.weight > self.best {
                    self.best = self.weight;
                    self.count = 0;
                    self.witness = picks.clone();
                }
                if self.weight == self.best {
                    self.count += 1;
                }
                return Ok(());
            }
            let cells: Vec<(usize, usize)> = self
                .inst
                .occurrences()
                .iter()
                .filter(|o| o.slot == slot)
                .map(|o| (o.channel, o.item))
                .collect();
            let mut choice = vec![None; states.len()];
            let mut all = Vec::new();
            expand(&cells, states, &mut choice, 0, &mut |c| all.push(c.to_vec()));
            for c in all {
                let saved = states.clone();
                for (a, pick) in c.iter().enumerate() {
                    match pick {
                        Some((ch, item)) => {
                            let n = self.counts.entry(*item).or_insert(0);
                            *n += 1;
                            if *n == 1 {
                                self.weight += self.inst.weight(*item);
                            }
                            picks[a].push((slot, *ch));
                            states[a] = *ch;
                        }
                        None => states[a] = 0,
                    }
                }
                let res = self.go(slot + 1, states, picks);
                for (a, pick) in c.iter().enumerate() {
                    if let Some((_, item)) = pick {
                        let n = self.counts.get_mut(item).expect("counted");
                        *n -= 1;
                        if *n == 0 {
                            self.weight -= self.inst.weight(*item);
                        }
                        picks[a].pop();
                    }
                }
                *states = saved;
                res?;
            }
            Ok(())
        }
    }
    let mut s = Search {
        inst,
        cap: caps.max_enumeration,
        leaves: 0,
        best: Rational::zero(),
        count: 0,
        witness: vec![Vec::new(); delta],
        counts: HashMap::new(),
        weight: Rational::zero(),
    };
    s.go(1, &mut vec![0; delta], &mut vec![Vec::new(); delta])?;
    Ok(OracleResult {
        optimum: s.best,
        witness: to_schedule(inst, s.witness),
        optimal_count: Some(s.count),
        stats: SearchStats {
            explored: s.leaves,
            peak: 0,
        },
    })
}

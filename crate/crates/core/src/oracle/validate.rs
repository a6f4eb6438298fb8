use std::collections::HashSet;

use crate::instance::{conflict_free, Instance, Occurrence};
use crate::schedule::Schedule;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("{used} antennae used but only {available} available")]
    TooManyAntennae { used: usize, available: usize },
    #[error("antenna {antenna}: {occurrence:?} is not broadcast")]
    NotBroadcast { antenna: usize, occurrence: Occurrence },
    #[error("antenna {antenna}: {second:?} does not come after {first:?}")]
    OutOfOrder {
        antenna: usize,
        first: Occurrence,
        second: Occurrence,
    },
    #[error("antenna {antenna}: cannot switch from {first:?} to {second:?}")]
    Conflict {
        antenna: usize,
        first: Occurrence,
        second: Occurrence,
    },
    #[error("antenna {antenna}: cell of {occurrence:?} already retrieved by another antenna")]
    SharedCell { antenna: usize, occurrence: Occurrence },
}

/// Checks a schedule against the broadcast program; reports the first violation.
pub fn validate_schedule(inst: &Instance, s: &Schedule) -> Result<(), Violation> {
    if s.antennas.len() > inst.antennae() {
        return Err(Violation::TooManyAntennae {
            used: s.antennas.len(),
            available: inst.antennae(),
        });
    }
    let mut cells = HashSet::new();
    for (a, seq) in s.antennas.iter().enumerate() {
        let antenna = a + 1;
        for (k, o) in seq.iter().enumerate() {
            if inst.item_at(o.channel, o.slot) != Some(o.item) {
                return Err(Violation::NotBroadcast { antenna, occurrence: *o });
            }
            if k > 0 {
                let prev = seq[k - 1];
                if o.slot <= prev.slot {
                    return Err(Violation::OutOfOrder {
                        antenna,
                        first: prev,
                        second: *o,
                    });
                }
                if !conflict_free(&prev, o) {
                    return Err(Violation::Conflict {
                        antenna,
                        first: prev,
                        second: *o,
                    });
                }
            }
            if !cells.insert(o.cell()) {
                return Err(Violation::SharedCell { antenna, occurrence: *o });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn inst() -> Instance {
        Instance::new(
            vec![Rational::from_integer(1); 2],
            2,
            3,
            2,
            [Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 2)],
        )
        .unwrap()
    }

    #[test]
    fn adjacent_switch_is_reported() {
        let s = Schedule {
            antennas: vec![vec![Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 2)]],
        };
        assert_eq!(
            validate_schedule(&inst(), &s),
            Err(Violation::Conflict {
                antenna: 1,
                first: Occurrence::new(1, 1, 1),
                second: Occurrence::new(2, 2, 2),
            })
        );
    }

    #[test]
    fn empty_is_valid() {
        let s = Schedule::empty(2);
        assert_eq!(validate_schedule(&inst(), &s), Ok(()));
        assert_eq!(s.weight(&inst()), Rational::from_integer(0));
    }

    #[test]
    fn other_violations() {
        let i = inst();
        let bogus = Schedule {
            antennas: vec![vec![Occurrence::new(2, 1, 1)]],
        };
        assert!(matches!(validate_schedule(&i, &bogus), Err(Violation::NotBroadcast { .. })));
        let shared = Schedule {
            antennas: vec![vec![Occurrence::new(1, 1, 1)], vec![Occurrence::new(1, 1, 1)]],
        };
        assert!(matches!(validate_schedule(&i, &shared), Err(Violation::SharedCell { antenna: 2, .. })));
        let three = Schedule::empty(3);
        assert!(matches!(validate_schedule(&i, &three), Err(Violation::TooManyAntennae { .. })));
    }
}

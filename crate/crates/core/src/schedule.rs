use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Occurrence};
use crate::Rational;

/// Per-antenna retrieval sequences, each ordered by slot.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub antennas: Vec<Vec<Occurrence>>,
}

impl Schedule {
    pub fn empty(antennae: usize) -> Self {
        Self {
            antennas: vec![Vec::new(); antennae],
        }
    }

    pub fn items(&self) -> BTreeSet<usize> {
        self.antennas.iter().flatten().map(|o| o.item).collect()
    }

    /// Total weight of distinct retrieved items.
    pub fn weight(&self, inst: &Instance) -> Rational {
        self.items().into_iter().map(|i| inst.weight(i)).sum()
    }

    pub fn len(&self) -> usize {
        self.antennas.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serializes")
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, seq) in self.antennas.iter().enumerate() {
            write!(f, "antenna {}:", a + 1)?;
            for o in seq {
                write!(f, " ({},{},{})", o.item, o.channel, o.slot)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ScheduleParseError {
    pub line: usize,
    pub msg: String,
}

/// Parses the `antenna <a>: (item,channel,slot) ...` line format.
pub fn parse_schedule(text: &str) -> Result<Schedule, ScheduleParseError> {
    let mut antennas: Vec<Vec<Occurrence>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| ScheduleParseError { line, msg };
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let (head, body) = raw
            .split_once(':')
            .ok_or_else(|| err("expected `antenna <a>:`".into()))?;
        let a: usize = head
            .trim()
            .strip_prefix("antenna")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| err(format!("bad antenna label `{head}`")))?;
        if a != antennas.len() + 1 {
            return Err(err(format!("antenna {a} out of order")));
        }
        let mut seq = Vec::new();
        for tok in body.split(')').map(str::trim).filter(|t| !t.is_empty()) {
            let inner = tok
                .strip_prefix('(')
                .ok_or_else(|| err(format!("bad triple `{tok}`")))?;
            let v: Vec<usize> = inner
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| err(format!("bad triple `{tok})`")))?;
            if v.len() != 3 {
                return Err(err(format!("bad triple `{tok})`")));
            }
            seq.push(Occurrence::new(v[0], v[1], v[2]));
        }
        antennas.push(seq);
    }
    Ok(Schedule { antennas })
}

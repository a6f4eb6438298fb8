#![allow(dead_code)]

use alwdr::dag::{build_basic_dag, Dag};
use alwdr::formulations::{build_edge_lp, FlowLp};
use alwdr::instance::{generate_random, GenParams, Instance, Occurrence};
use alwdr::Rational;
use alwdr_lp::{solve, LpSolution, Status};

pub fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// 0.632120558829 rounds 1 − 1/e = 0.6321205588285576… up, so comparisons
/// against it are at least as strict as against the true constant.
pub fn one_minus_inv_e_upper() -> Rational {
    q(632_120_558_829, 1_000_000_000_000)
}

/// First `count` instances that the generator accepts, drawing parameters
/// from `params(seed)`.
pub fn corpus(count: usize, params: impl Fn(u64) -> GenParams) -> Vec<(u64, Instance)> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        if let Ok(inst) = generate_random(&params(seed), seed) {
            out.push((seed, inst));
        }
        seed += 1;
        assert!(seed < 100 * count as u64 + 1000, "generator rejects too many parameter draws");
    }
    out
}

/// Each item broadcast once; m ≤ 4, T ≤ 12, δ ∈ {1, 2}.
pub fn single_occurrence_params(seed: u64) -> GenParams {
    let channels = 1 + (seed % 4) as usize;
    let slots = 4 + (seed % 9) as usize;
    GenParams {
        items: channels * slots,
        channels,
        slots,
        antennae: if channels > 1 { 1 + (seed / 4 % 2) as usize } else { 1 },
        density: 0.55,
        single_occurrence: true,
        ..GenParams::default()
    }
}

/// γ-separated, each item at most once per segment; γ ≤ 4, m ≤ 3, T ≤ 30.
pub fn separated_params(seed: u64) -> GenParams {
    GenParams {
        items: 14,
        channels: 1 + (seed % 3) as usize,
        slots: 10 + (seed % 21) as usize,
        antennae: 1,
        density: 0.7,
        max_occurrences: 4,
        gamma: Some(1 + (seed / 3 % 4) as usize),
        once_per_segment: true,
        ..GenParams::default()
    }
}

/// Small instances with repeated items, for exact-solver comparisons.
pub fn repeat_params(seed: u64) -> GenParams {
    GenParams {
        items: 6,
        channels: 3,
        slots: 7,
        antennae: 1 + (seed % 2) as usize,
        density: 0.45,
        max_occurrences: 2,
        ..GenParams::default()
    }
}

pub fn edge_lp(inst: &Instance, delta: usize) -> (Dag, FlowLp, LpSolution<Rational>) {
    let g = build_basic_dag(inst);
    let lp = build_edge_lp(&g, delta);
    let sol: LpSolution<Rational> = solve(&lp.problem).expect("edge LP solves");
    assert_eq!(sol.status, Status::Optimal);
    (g, lp, sol)
}

/// One antenna may go from `a` to `b` iff `b` is later on the same channel
/// or at least two slots later on another one.
fn can_follow(a: &Occurrence, b: &Occurrence) -> bool {
    if a.channel == b.channel {
        b.slot > a.slot
    } else {
        b.slot >= a.slot + 2
    }
}

/// Every single-antenna retrieval sequence, the empty one included.
pub fn all_sequences(inst: &Instance) -> Vec<Vec<Occurrence>> {
    let occ = inst.occurrences();
    let mut out = vec![Vec::new()];
    let mut stack: Vec<Vec<Occurrence>> = occ.iter().map(|o| vec![*o]).collect();
    while let Some(seq) = stack.pop() {
        let last = *seq.last().expect("non-empty");
        for o in occ {
            if can_follow(&last, o) {
                let mut next = seq.clone();
                next.push(*o);
                stack.push(next);
            }
        }
        out.push(seq);
    }
    out
}

/// Weight of the distinct items in a set of occurrences.
pub fn distinct_weight(inst: &Instance, occ: impl IntoIterator<Item = Occurrence>) -> Rational {
    let mut items: Vec<usize> = occ.into_iter().map(|o| o.item).collect();
    items.sort_unstable();
    items.dedup();
    items.into_iter().map(|i| inst.weight(i)).sum()
}

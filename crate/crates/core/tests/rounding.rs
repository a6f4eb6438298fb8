mod common;

use alwdr::driver::{round_once, Algorithm, DriverCaps};
use alwdr::instance::*;
use alwdr::oracle::validate_schedule;
use alwdr::rounding::*;
use alwdr::Rational;
use alwdr_lp::is_integral;
use common::{corpus, edge_lp, q, r, separated_params};

#[test]
fn fair_coin_within_three_sigma() {
    let mut rng = RandomSource::new(11);
    let masses = [q(1, 2), q(1, 2)];
    let heads = (0..10_000).filter(|_| rng.pick(&masses) == Some(0)).count();
    // σ = sqrt(10000 · 1/4) = 50
    assert!(heads.abs_diff(5000) <= 150, "{heads}");
    assert_eq!(RandomSource::new(3).pick(&[r(0), r(0)]), None);
    assert_eq!(RandomSource::new(3).pick(&[r(0), q(1, 3)]), Some(1));
}

/// Separated instances whose edge-LP optimum is fractional.
fn fractional(count: usize, delta: usize) -> Vec<(u64, Instance)> {
    let params = move |seed: u64| GenParams {
        channels: 2 + (seed % 2) as usize,
        antennae: delta,
        ..separated_params(seed)
    };
    let mut out = Vec::new();
    for (seed, inst) in corpus(40 * count, params) {
        let (_, _, sol) = edge_lp(&inst, delta);
        if !is_integral(&sol, &r(0)) {
            out.push((seed, inst));
            if out.len() == count {
                break;
            }
        }
    }
    assert_eq!(out.len(), count, "not enough fractional optima");
    out
}

#[test]
fn decomposition_is_lossless() {
    for delta in [1, 2] {
        for (seed, inst) in fractional(10, delta) {
            let (g, lp, sol) = edge_lp(&inst, delta);
            let x = lp.edge_values(&sol.values);
            let d = decompose_flow(&g, x, delta).unwrap();
            for (h, seg) in d.segments.iter().enumerate() {
                assert!(seg.subflows.len() <= seg.arcs, "seed {seed} segment {h}");
                let carried: Rational = seg.subflows.iter().map(|f| f.value).sum();
                assert_eq!(carried + seg.idle, Rational::from_integer(delta as i128));
            }
            for e in g.edges.iter() {
                let Some(h) = e.segment else { continue };
                let total: Rational = d.segments[h]
                    .subflows
                    .iter()
                    .filter(|f| f.edges.contains(&e.id))
                    .map(|f| f.value)
                    .sum();
                assert_eq!(total, x[e.id], "seed {seed} edge {}", e.id);
            }
        }
    }
}

#[test]
fn two_antennae_never_share_a_cell() {
    for (seed, inst) in fractional(10, 2) {
        let (g, lp, sol) = edge_lp(&inst, 2);
        let d = decompose_flow(&g, lp.edge_values(&sol.values), 2).unwrap();
        for draw in 0..50 {
            let s = round_flows_collective(&d, &g, &mut RandomSource::new(draw)).unwrap();
            validate_schedule(&inst, &s).unwrap_or_else(|v| panic!("seed {seed} draw {draw}: {v}"));
        }
    }
}

#[test]
fn one_segment_takes_the_heaviest_subflow() {
    let params = |seed: u64| GenParams {
        items: 8,
        channels: 2,
        slots: 5,
        density: 1.0,
        max_occurrences: 2,
        ..separated_params(seed)
    };
    for (seed, inst) in corpus(20, |s| GenParams { gamma: None, once_per_segment: false, ..params(s) }) {
        assert_eq!(segment_map(&inst).len(), 1);
        let (g, lp, sol) = edge_lp(&inst, 1);
        let x = lp.edge_values(&sol.values);
        let d = decompose_flow(&g, x, 1).unwrap();
        let best = d.segments[0]
            .subflows
            .iter()
            .map(|f| common::distinct_weight(&inst, f.occurrences.iter().map(|&o| g.occurrences[o])))
            .max()
            .unwrap();
        assert_eq!(derandomize(&d, &g, x).unwrap().weight(&inst), best, "seed {seed}");
    }
}

#[test]
fn derandomized_beats_the_sample_mean() {
    let instances = corpus(40, separated_params);
    let mut wins = 0;
    for (seed, inst) in &instances {
        let (g, lp, sol) = edge_lp(inst, 1);
        let x = lp.edge_values(&sol.values);
        let d = decompose_flow(&g, x, 1).unwrap();
        let det = derandomize(&d, &g, x).unwrap().weight(inst);
        let mut rng = RandomSource::new(*seed);
        let total: Rational = (0..500)
            .map(|_| round_flows_collective(&d, &g, &mut rng).unwrap().weight(inst))
            .sum();
        if det >= total / Rational::from_integer(500) {
            wins += 1;
        }
    }
    assert!(wins * 100 >= 95 * instances.len(), "{wins}/{}", instances.len());
}

#[test]
fn rounding_is_valid_and_reproducible() {
    let caps = DriverCaps::default();
    for (seed, inst) in corpus(30, separated_params) {
        for delta in 1..=inst.channels().min(2) {
            let inst = inst.with_antennae(delta).unwrap();
            for alg in [Algorithm::PathRounding, Algorithm::Collective, Algorithm::Derandomized] {
                let (a, lp) = round_once(&inst, alg, &mut RandomSource::new(seed), &caps).unwrap();
                let (b, _) = round_once(&inst, alg, &mut RandomSource::new(seed), &caps).unwrap();
                assert_eq!(a, b, "{alg} seed {seed}");
                validate_schedule(&inst, &a).unwrap();
                assert!(a.weight(&inst) <= lp);
            }
            let (d1, _) = round_once(&inst, Algorithm::Derandomized, &mut RandomSource::new(1), &caps).unwrap();
            let (d2, _) = round_once(&inst, Algorithm::Derandomized, &mut RandomSource::new(2), &caps).unwrap();
            assert_eq!(d1, d2);
        }
    }
}

mod common;

use alwdr::driver::{edge_lp_value, round_once, Algorithm, DriverCaps};
use alwdr::instance::*;
use alwdr::oracle::*;
use alwdr::rounding::RandomSource;
use alwdr::schedule::Schedule;
use common::{corpus, r, repeat_params};
use proptest::prelude::*;

#[test]
fn dp_and_enumeration_agree() {
    for (seed, inst) in corpus(40, repeat_params) {
        let delta = inst.antennae();
        let dp = brute_force_optimal(&inst, delta, &Caps::default()).unwrap();
        let en = enumerate_optimal(&inst, delta, &Caps::default()).unwrap();
        assert_eq!(dp.optimum, en.optimum, "seed {seed}");
        validate_schedule(&inst, &dp.witness).unwrap();
        validate_schedule(&inst, &en.witness).unwrap();
        assert_eq!(dp.witness.weight(&inst), dp.optimum);
        assert!(en.optimal_count.unwrap() >= 1);
    }
}

#[test]
fn penalty_lp_solver_matches_dp() {
    for (seed, inst) in corpus(40, repeat_params) {
        let delta = inst.antennae();
        let fpt = fpt_exact(&inst, delta, 1 << 22).unwrap();
        let dp = brute_force_optimal(&inst, delta, &Caps::default()).unwrap();
        assert_eq!(fpt.optimum, dp.optimum, "seed {seed}");
        validate_schedule(&inst, &fpt.witness).unwrap();
        assert_eq!(fpt.witness.weight(&inst), fpt.optimum);
    }
}

#[test]
fn rounding_below_oracle_below_lp() {
    let caps = DriverCaps::default();
    for (seed, inst) in corpus(30, repeat_params) {
        let delta = inst.antennae();
        let opt = brute_force_optimal(&inst, delta, &Caps::default()).unwrap().optimum;
        assert!(opt <= edge_lp_value(&inst, delta).unwrap());
        for alg in [Algorithm::PathRounding, Algorithm::Collective, Algorithm::Derandomized] {
            let (s, _) = round_once(&inst, alg, &mut RandomSource::new(seed), &caps).unwrap();
            assert!(s.weight(&inst) <= opt, "{alg} seed {seed}");
        }
    }
}

#[test]
fn caps_are_reported() {
    let inst = corpus(1, repeat_params).remove(0).1;
    let tiny = Caps {
        max_states: 1,
        max_enumeration: 1,
    };
    assert!(matches!(brute_force_optimal(&inst, 1, &tiny), Err(OracleError::CapExceeded { .. })));
    assert!(matches!(enumerate_optimal(&inst, 1, &tiny), Err(OracleError::CapExceeded { .. })));
    assert!(matches!(
        brute_force_optimal(&inst, 4, &Caps::default()),
        Err(OracleError::TooManyAntennae { .. })
    ));
}

#[test]
fn validator_rejects_bad_schedules() {
    let inst = Instance::new(
        vec![r(1), r(1), r(1)],
        2,
        3,
        1,
        [Occurrence::new(1, 1, 1), Occurrence::new(2, 2, 2), Occurrence::new(3, 1, 3)],
    )
    .unwrap();
    let one = |seq: Vec<Occurrence>| Schedule { antennas: vec![seq] };
    let a = Occurrence::new(1, 1, 1);
    let b = Occurrence::new(2, 2, 2);
    let c = Occurrence::new(3, 1, 3);
    assert!(validate_schedule(&inst, &one(vec![a, c])).is_ok());
    assert!(matches!(validate_schedule(&inst, &one(vec![a, b])), Err(Violation::Conflict { .. })));
    assert!(matches!(validate_schedule(&inst, &one(vec![c, a])), Err(Violation::OutOfOrder { .. })));
    assert!(matches!(
        validate_schedule(&inst, &one(vec![Occurrence::new(1, 2, 1)])),
        Err(Violation::NotBroadcast { .. })
    ));
    let two = Schedule {
        antennas: vec![vec![a], vec![b]],
    };
    assert!(matches!(validate_schedule(&inst, &two), Err(Violation::TooManyAntennae { .. })));
    let inst2 = inst.with_antennae(2).unwrap();
    assert!(validate_schedule(&inst2, &two).is_ok());
    let shared = Schedule {
        antennas: vec![vec![a], vec![a]],
    };
    assert!(matches!(validate_schedule(&inst2, &shared), Err(Violation::SharedCell { .. })));
}

fn small_instance() -> impl Strategy<Value = Instance> {
    (1usize..4, 2usize..7, any::<u64>()).prop_filter_map("generator rejected", |(m, t, seed)| {
        let p = GenParams {
            items: 5,
            channels: m,
            slots: t,
            density: 0.5,
            max_occurrences: 2,
            ..GenParams::default()
        };
        generate_random(&p, seed).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn extra_broadcast_never_hurts(inst in small_instance(), item in 1usize..=5, pick in any::<usize>()) {
        let free: Vec<(usize, usize)> = (1..=inst.slots())
            .flat_map(|s| (1..=inst.channels()).map(move |c| (c, s)))
            .filter(|&(c, s)| inst.item_at(c, s).is_none())
            .collect();
        prop_assume!(!free.is_empty());
        let (c, s) = free[pick % free.len()];
        let more = Instance::new(
            inst.items().iter().map(|i| i.weight).collect(),
            inst.channels(),
            inst.slots(),
            inst.antennae(),
            inst.occurrences().iter().copied().chain([Occurrence::new(item, c, s)]),
        ).unwrap();
        let before = brute_force_optimal(&inst, 1, &Caps::default()).unwrap().optimum;
        let after = brute_force_optimal(&more, 1, &Caps::default()).unwrap().optimum;
        prop_assert!(after >= before);
    }

    #[test]
    fn more_antennae_never_hurt(inst in small_instance()) {
        let mut prev = r(0);
        for delta in 1..=inst.channels() {
            let opt = brute_force_optimal(&inst, delta, &Caps::default()).unwrap().optimum;
            prop_assert!(opt >= prev);
            prev = opt;
        }
    }
}

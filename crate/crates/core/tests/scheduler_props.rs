//! Scheduler relations and verifier properties on small random systems.

use std::collections::BTreeSet;

use mchairs_core::sim::{
    apply, run_adversary, successors, AdversaryParams, Configuration, RunOutcome, SchedulerKind,
    Strategy as Adversary,
};
use mchairs_core::verify::{
    check_terminal, longest_schedule, verify_mc, VerifyError, VerifyOptions,
};
use mchairs_core::word::{Mode, Relabeling, SystemKind, WordExpr, WordSystem};
use num_bigint::BigUint;
use proptest::prelude::*;

fn system(words: &[Vec<u32>], m: u32) -> WordSystem {
    let w = words
        .iter()
        .map(|s| WordExpr::literal(s).unwrap())
        .collect();
    WordSystem::new(m, SystemKind::Mc, w).unwrap()
}

/// `(m, words, positions)` with 2 to 4 players.
fn config_input() -> impl Strategy<Value = (u32, Vec<Vec<u32>>, Vec<u64>)> {
    (1..=3u32, 2..=4usize).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(1..=m, 1..=4), n).prop_flat_map(move |words| {
            let pos: Vec<_> = words.iter().map(|w| 0..w.len() as u64).collect();
            (Just(m), Just(words), pos)
        })
    })
}

fn small_system() -> impl Strategy<Value = (u32, Vec<Vec<u32>>)> {
    (2..=4u32, 2..=3usize).prop_flat_map(|(m, n)| {
        (
            Just(m),
            prop::collection::vec(prop::collection::vec(1..=m, 1..=5), n),
        )
    })
}

fn positions(c: &Configuration) -> Vec<BigUint> {
    c.positions().to_vec()
}

fn opts() -> VerifyOptions {
    VerifyOptions::with_cap(100_000)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2_000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn relations_are_nested((m, words, pos) in config_input()) {
        let sys = system(&words, m);
        let n = words.len();
        let start = Configuration::new(
            &sys,
            (0..n).collect(),
            pos.iter().map(|&p| BigUint::from(p)).collect(),
            Mode::Cyclic,
        )
        .unwrap();
        let set = |k| -> BTreeSet<Vec<BigUint>> {
            successors(&sys, &start, k).unwrap().iter().map(|(_, c)| positions(c)).collect()
        };
        let imm = set(SchedulerKind::Immediate);
        let pair = set(SchedulerKind::Pairwise);
        let canon = set(SchedulerKind::Canonical);
        prop_assert!(canon.is_subset(&pair));
        prop_assert!(pair.is_subset(&imm));
        prop_assert_eq!(start.is_safe(), imm.is_empty());
        prop_assert_eq!(start.is_safe(), canon.is_empty());

        for (mv, next) in successors(&sys, &start, SchedulerKind::Immediate).unwrap() {
            let moved = mv.players();
            for p in 0..n {
                let len = BigUint::from(words[p].len());
                let want = if moved.contains(&p) {
                    (&start.positions()[p] + 1u32) % &len
                } else {
                    start.positions()[p].clone()
                };
                prop_assert_eq!(&next.positions()[p], &want);
                prop_assert!(next.positions()[p] < len);
            }
            prop_assert_eq!(apply(&sys, &start, &mv).unwrap(), next);
        }
    }

    #[test]
    fn verdict_is_invariant_under_relabeling((m, words) in small_system(), seed in any::<u64>()) {
        let sys = system(&words, m);
        let mut sigma: Vec<u32> = (1..=m).collect();
        let mut s = seed;
        for i in (1..sigma.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            sigma.swap(i, (s >> 33) as usize % (i + 1));
        }
        let map = Relabeling::new(sigma).unwrap();
        let moved: Vec<WordExpr> = sys.words().iter().map(|w| WordExpr::relabel(w.clone(), map.clone()).unwrap()).collect();
        let other = WordSystem::new(m, SystemKind::Mc, moved).unwrap();
        let all: Vec<usize> = (0..words.len()).collect();
        let a = verify_mc(&sys, &all, &opts()).unwrap();
        let b = verify_mc(&other, &all, &opts()).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.longest_schedule, b.longest_schedule);
        prop_assert_eq!(a.per_player_max_moves, b.per_player_max_moves);
    }

    #[test]
    fn terminality_is_monotone((m, words) in small_system()) {
        let sys = system(&words, m);
        let all: Vec<usize> = (0..words.len()).collect();
        if check_terminal(&sys, &all, &opts()).unwrap() {
            for drop in 0..all.len() {
                let sub: Vec<usize> = all.iter().copied().filter(|&i| i != drop).collect();
                prop_assert!(check_terminal(&sys, &sub, &opts()).unwrap());
            }
        }
    }

    #[test]
    fn longest_schedule_bounds_every_run((m, words) in small_system(), seed in any::<u64>()) {
        let sys = system(&words, m);
        let all: Vec<usize> = (0..words.len()).collect();
        let states: usize = words.iter().map(Vec::len).product();
        match longest_schedule(&sys, &all, &opts()) {
            Ok(l) => {
                prop_assert!(l.total < BigUint::from(states));
                let total: u64 = (&l.total).try_into().unwrap();
                for run in 0..20u64 {
                    let init: Vec<BigUint> = words
                        .iter()
                        .enumerate()
                        .map(|(i, w)| BigUint::from((seed >> (i * 8)) as usize % w.len()))
                        .collect();
                    let params = AdversaryParams {
                        kind: SchedulerKind::Pairwise,
                        strategy: Adversary::Random,
                        step_cap: total + 1,
                        seed: seed ^ run,
                    };
                    let t = run_adversary(&sys, &all, &init, &params).unwrap();
                    prop_assert_eq!(t.outcome, RunOutcome::Safe);
                    prop_assert!(t.steps() as u64 <= total);
                }
            }
            Err(VerifyError::NotOblivious) => {
                let r = verify_mc(&sys, &all, &opts()).unwrap();
                let w = r.witness.unwrap();
                prop_assert!(w.is_cycle(&sys, &all, Mode::Cyclic, SchedulerKind::Pairwise));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn successor_counts_for_three_players_on_one_chair() {
    let sys = system(&[vec![1, 2], vec![1, 3], vec![1, 2, 3]], 3);
    let c = Configuration::at_start(&sys, vec![0, 1, 2], Mode::Cyclic).unwrap();
    let count = |k| successors(&sys, &c, k).unwrap().len();
    assert_eq!(count(SchedulerKind::Immediate), 7);
    assert_eq!(count(SchedulerKind::Pairwise), 9);
    assert_eq!(count(SchedulerKind::Canonical), 3);
}

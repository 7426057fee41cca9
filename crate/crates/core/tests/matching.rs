mod common;

use common::{random_instance, to_instance, to_vec, RawInstance, SplitMix};
use proptest::prelude::*;
use tewa::matching::*;

#[test]
fn deferred_acceptance_is_stable_and_proposer_optimal() {
    let mut rng = SplitMix(20_240_601);
    for case in 0..100 {
        let small = case % 2 == 0;
        let (mp, ma) = if small { (5, 5) } else { (8, 8) };
        let raw = random_instance(&mut rng, mp, ma, case % 3 == 0);
        let inst = to_instance(&raw);
        let m = deferred_acceptance(&inst);
        let got = to_vec(&m, raw.w.len());

        assert!(is_stable(&inst, &m).unwrap().is_empty(), "case {case}: library reports blocking pairs");
        assert!(raw.blocking_pairs(&got).is_empty(), "case {case}: oracle finds blocking pairs in {got:?}");
        for a in 0..raw.cap.len() {
            assert!(got.iter().filter(|x| **x == Some(a)).count() <= raw.cap[a]);
        }

        if raw.w.len() <= 5 && raw.cap.len() <= 5 {
            let stable = raw.stable_set();
            assert!(stable.contains(&got), "case {case}: not in the enumerated stable set");
            // Every proposer does at least as well as in any other stable matching.
            for other in &stable {
                for p in 0..raw.w.len() {
                    match (got[p], other[p]) {
                        (_, None) => {}
                        (None, Some(_)) => panic!("case {case}: proposer {p} unmatched but matchable"),
                        (Some(a), Some(b)) => assert!(a == b || raw.p_prefers(p, a, b), "case {case}: {p}"),
                    }
                }
            }
        }
    }
}

#[test]
fn swapped_pairs_are_blocked() {
    // Strict 2x2 preferences: both sides agree on the diagonal.
    let raw = RawInstance {
        w: vec![vec![Some(0.9), Some(0.1)], vec![Some(0.2), Some(0.8)]],
        cap: vec![1, 1],
    };
    let inst = to_instance(&raw);
    let diagonal = deferred_acceptance(&inst);
    assert_eq!(to_vec(&diagonal, 2), vec![Some(0), Some(1)]);
    let swapped = Matching {
        assignment: [(0usize, 1usize), (1, 0)].into_iter().collect(),
        unmatched: Default::default(),
    };
    let blocking = is_stable(&inst, &swapped).unwrap();
    assert!(!blocking.is_empty());
    assert_eq!(raw.blocking_pairs(&[Some(1), Some(0)]).len(), blocking.len());
}

#[test]
fn empty_matching_is_blocked_by_any_allowed_pair() {
    let raw = RawInstance { w: vec![vec![Some(0.5)]], cap: vec![1] };
    let inst = to_instance(&raw);
    let empty = Matching { assignment: Default::default(), unmatched: [0usize].into_iter().collect() };
    assert_eq!(is_stable(&inst, &empty).unwrap(), vec![(0, 0)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn proposals_bounded_and_capacity_never_exceeded(seed in any::<u64>()) {
        let raw = random_instance(&mut SplitMix(seed), 8, 8, seed % 2 == 0);
        let inst = to_instance(&raw);
        let allowed = raw.w.iter().flatten().filter(|w| w.is_some()).count();
        let mut held = vec![0usize; raw.cap.len()];
        let mut over = false;
        let out = deferred_acceptance_observed(&inst, |e| match e {
            MatchEvent::Accept { acceptor, held: h, .. } => {
                held[*acceptor] = h;
                over |= h > raw.cap[*acceptor];
            }
            MatchEvent::Evict { acceptor, held: h, .. } => held[*acceptor] = h,
            _ => {}
        });
        prop_assert!(!over);
        prop_assert!(out.proposals <= allowed);
        prop_assert_eq!(out.matching, deferred_acceptance(&inst));
    }

    #[test]
    fn common_positive_scale_keeps_matching(seed in any::<u64>(), k in 1e-3..1e3f64) {
        let raw = random_instance(&mut SplitMix(seed), 8, 8, false);
        let inst = to_instance(&raw);
        let scaled = inst.map_weights(|w| w * k);
        prop_assert_eq!(deferred_acceptance(&inst), deferred_acceptance(&scaled));
    }
}

mod common;

use std::collections::BTreeSet;

use imp_core::finsys::{FinSet, StateSet, System, SystemMap, TotalFn};
use proptest::prelude::*;

fn system_strategy(max_states: usize, max_inputs: usize) -> impl Strategy<Value = System> {
    (1..=max_states, 1..=max_inputs).prop_flat_map(|(n, k)| {
        prop::collection::vec(0..n, n * k).prop_map(move |table| {
            let states = FinSet::numbered("X", "x", n).unwrap();
            let inputs = if k == 1 {
                FinSet::unit()
            } else {
                FinSet::numbered("I", "i", k).unwrap()
            };
            System::from_rule(&states, &inputs, |x, i| table[x * k + i]).unwrap()
        })
    })
}

fn with_subset(max_states: usize, max_inputs: usize) -> impl Strategy<Value = (System, StateSet)> {
    system_strategy(max_states, max_inputs).prop_flat_map(|sys| {
        let n = sys.states().len();
        (Just(sys), prop::collection::btree_set(0..n, 1..=n))
    })
}

/// Every state reachable in exactly `k` steps under some word.
fn reachable_in(sys: &System, x: usize, k: usize) -> BTreeSet<usize> {
    let mut frontier = BTreeSet::from([x]);
    for _ in 0..k {
        frontier = frontier
            .iter()
            .flat_map(|&y| sys.inputs().indices().map(move |i| sys.step(y, i)))
            .collect();
    }
    frontier
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn horizon_agrees_with_exhaustive_words((sys, seed) in with_subset(12, 3)) {
        let subset = sys.largest_invariant_subset(&seed);
        prop_assume!(!subset.is_empty());
        let report = sys.attraction(&subset).unwrap();
        let n = sys.states().len();
        match report.horizon {
            Some(h) => {
                for x in sys.states().indices() {
                    prop_assert!(reachable_in(&sys, x, h).is_subset(&subset));
                }
                if h > 0 {
                    let late = sys
                        .states()
                        .indices()
                        .any(|x| !reachable_in(&sys, x, h - 1).is_subset(&subset));
                    prop_assert!(late, "horizon {h} is not least");
                }
            }
            None => {
                for &x in &report.stranded {
                    prop_assert!(!reachable_in(&sys, x, n + 1).is_subset(&subset));
                }
                prop_assert!(!report.stranded.is_empty());
            }
        }
    }

    #[test]
    fn invariant_subsets_never_escape(
        (sys, seed) in with_subset(10, 3),
        words in prop::collection::vec(prop::collection::vec(0usize..3, 0..12), 1..6),
    ) {
        let subset = sys.largest_invariant_subset(&seed);
        prop_assert!(sys.is_forward_invariant(&subset));
        prop_assert!(sys.find_escape(&subset).is_none());
        let k = sys.inputs().len();
        for &x in &subset {
            for word in &words {
                let word: Vec<usize> = word.iter().map(|i| i % k).collect();
                for y in sys.run(x, &word) {
                    prop_assert!(subset.contains(&y));
                }
            }
        }
    }

    #[test]
    fn escape_witness_really_escapes((sys, subset) in with_subset(10, 3)) {
        match sys.find_escape(&subset) {
            Some((x, i)) => {
                prop_assert!(subset.contains(&x));
                prop_assert!(!subset.contains(&sys.step(x, i)));
            }
            None => prop_assert!(sys.is_forward_invariant(&subset)),
        }
    }

    #[test]
    fn generated_models_have_partitioning_fibres(seed in any::<u64>(), m in 1usize..5, f in 1usize..4) {
        let mu = common::random_model(seed, m, f);
        let report = mu.model_report();
        prop_assert!(report.is_model());
        let mut seen = BTreeSet::new();
        for k in mu.target().states().indices() {
            let fibre = mu.fibre(k);
            prop_assert!(!fibre.is_empty());
            for x in fibre {
                prop_assert!(seen.insert(x));
            }
        }
        prop_assert_eq!(seen.len(), mu.source().states().len());
    }

    #[test]
    fn identities_are_units(seed in any::<u64>(), m in 1usize..5, f in 1usize..4) {
        let mu = common::random_model(seed, m, f);
        let left = SystemMap::identity(mu.source()).then(&mu).unwrap();
        let right = mu.then(&SystemMap::identity(mu.target())).unwrap();
        prop_assert_eq!(&left, &mu);
        prop_assert_eq!(&right, &mu);
    }

    #[test]
    fn composition_is_associative(
        (a, b, c, d) in (system_strategy(4, 2), system_strategy(4, 2), system_strategy(4, 2), system_strategy(4, 2)),
        tables in prop::collection::vec(prop::collection::vec(0usize..64, 8), 6),
    ) {
        let map = |s: &System, t: &System, st: &[usize], it: &[usize]| {
            let on_states = TotalFn::from_fn(s.states(), t.states(), |x| st[x] % t.states().len()).unwrap();
            let chart = FinSet::pair(s.states(), s.inputs()).unwrap();
            let on_inputs = TotalFn::from_fn(&chart, t.inputs(), |xi| it[xi] % t.inputs().len()).unwrap();
            SystemMap::new(s.clone(), t.clone(), on_states, on_inputs).unwrap()
        };
        let f = map(&a, &b, &tables[0], &tables[1]);
        let g = map(&b, &c, &tables[2], &tables[3]);
        let h = map(&c, &d, &tables[4], &tables[5]);
        let lhs = f.then(&g).unwrap().then(&h).unwrap();
        let rhs = f.then(&g.then(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // composites of maps of systems are maps of systems
        if f.check().commutes && g.check().commutes {
            prop_assert!(f.then(&g).unwrap().check().commutes);
        }
    }
}

#[test]
fn clock_examples() {
    let c4 = common::clock("Clock4", "x", 4);
    assert_eq!(c4.run_named("x0", &["*", "*"]).unwrap(), ["x0", "x1", "x2"]);
    let c2 = common::clock("Clock2", "m", 2);
    assert_eq!(c2.run_named("m1", &[]).unwrap(), ["m1"]);
    assert!(c2.is_autonomous());
    let all: StateSet = c4.states().indices().collect();
    assert_eq!(c4.attraction(&all).unwrap().horizon, Some(0));
    let x0 = c4.state_set(&["x0"]).unwrap();
    assert_eq!(c4.find_escape(&x0), Some((0, 0)));
    assert!(c4.attraction(&x0).is_err());
}

#[test]
fn e1_model_and_its_perturbation() {
    let mu = common::e1();
    assert!(mu.model_report().is_model());
    assert_eq!(mu.fibre(0), [0, 2]);
    assert_eq!(mu.fibre(1), [1, 3]);
    let bad = TotalFn::new(mu.source().states().clone(), mu.target().states().clone(), vec![0, 0, 0, 1])
        .unwrap();
    let bad = SystemMap::with_default_inputs(mu.source().clone(), mu.target().clone(), bad).unwrap();
    let report = bad.model_report();
    assert!(!report.is_model());
    assert!(report.counterexamples.contains(&(0, 0)));
}

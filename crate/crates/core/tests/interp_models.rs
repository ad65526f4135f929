mod common;

use std::collections::BTreeSet;

use imp_core::finsys::{pair_index, FinSet, TotalFn};
use imp_core::interp::{
    check_indexed_model, check_interpretation, closure_kernel, derive_interpretation,
    diamond_update, indexed_model_sides, positivity_key_step, preimage_kernel, Reasoner,
};
use imp_core::kernelcat::{compare, Markov, Positivity, RelKernel};
use proptest::prelude::*;

/// Both sides of the consistency equation at `θ`, as sets of
/// `(hidden, observation)` pairs, by direct enumeration.
fn consistency_oracle(r: &Reasoner, theta: usize) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    let ny = r.observations().len();
    let lhs: BTreeSet<(usize, usize)> = r
        .interpretation()
        .image(theta)
        .iter()
        .flat_map(|&x| r.model().image(x).iter().map(move |&xy| (xy / ny, xy % ny)))
        .collect();
    let rhs = lhs
        .iter()
        .flat_map(|&(_, y)| {
            r.interpretation()
                .image(r.next_param(y, theta))
                .iter()
                .map(move |&x| (x, y))
        })
        .collect();
    (lhs, rhs)
}

fn names(set: &FinSet, pairs: &BTreeSet<(usize, usize)>, obs: &FinSet) -> Vec<String> {
    pairs
        .iter()
        .map(|&(x, y)| format!("({},{})", set.name(x), obs.name(y)))
        .collect()
}

#[test]
fn e1_fibres_closure_and_diamond() {
    let mu = common::e1();
    let pre = preimage_kernel(mu.on_states()).unwrap();
    assert_eq!(pre.image_names(0), ["x0", "x2"]);
    assert_eq!(pre.image_names(1), ["x1", "x3"]);
    let closure = closure_kernel(mu.on_states()).unwrap();
    assert_eq!(closure.image_names(0), ["x0", "x2"]);
    // the closure is the composite "function then preimage"
    assert_eq!(
        RelKernel::from_fn(mu.on_states()).then(&pre).unwrap(),
        closure
    );
    // the other order is the identity on M
    assert_eq!(pre.then(&RelKernel::from_fn(mu.on_states())).unwrap(), RelKernel::identity(mu.target().states()));
    let diamond = diamond_update(mu.source(), mu.on_states()).unwrap();
    assert_eq!(diamond.image_names(0), ["x1", "x3"]);
    assert_eq!(diamond.image(0), closure.image(1));
}

#[test]
fn e1_indexed_model() {
    let mu = common::e1();
    assert!(check_indexed_model(&mu).unwrap().holds);
    let (lhs, rhs) = indexed_model_sides(&mu).unwrap();
    assert_eq!(lhs.image_names(0), ["x1", "x3"]);
    assert_eq!(rhs.image_names(0), ["x1", "x3"]);
    // perturb ◇upd directly: let x0 also reach x0
    let mut rows = diamond_update(mu.source(), mu.on_states()).unwrap().rows().to_vec();
    rows[0] = BTreeSet::from([0, 1, 3]);
    let x = mu.source().states().clone();
    let bad = RelKernel::new(x.clone(), x, rows).unwrap();
    let lhs = preimage_kernel(mu.on_states()).unwrap().then(&bad).unwrap();
    let check = compare("indexed model", &lhs, &rhs).unwrap();
    assert!(!check.holds);
    assert_eq!(check.witnesses.len(), 1);
    assert_eq!(check.witnesses[0].input, "m0");
}

#[test]
fn e1_reasoner() {
    let mu = common::e1();
    let r = derive_interpretation(&mu).unwrap();
    assert_eq!(r.interpretation().image_names(0), ["x0", "x2"]);
    assert_eq!(r.model().image_names(0), ["(x1,x0)", "(x3,x0)"]);
    for y in r.observations().indices() {
        assert_eq!(r.params().name(r.next_param(y, 0)), "m1");
    }
    let (lhs, rhs) = consistency_oracle(&r, 0);
    let expected = ["(x1,x0)", "(x1,x2)", "(x3,x0)", "(x3,x2)"];
    assert_eq!(names(r.hidden(), &lhs, r.observations()), expected);
    assert_eq!(names(r.hidden(), &rhs, r.observations()), expected);
    let report = check_interpretation(&r).unwrap();
    assert!(report.consistency.holds);
    assert!(report.beliefs_disjoint && report.observations_ignored);
}

#[test]
fn identity_model_has_singleton_beliefs() {
    let c2 = common::clock("Clock2", "m", 2);
    let mu = imp_core::finsys::SystemMap::identity(&c2);
    let r = derive_interpretation(&mu).unwrap();
    assert_eq!(r.model().image_names(0), ["(m1,m0)"]);
    assert_eq!(r.model().image_names(1), ["(m0,m1)"]);
    assert!(check_interpretation(&r).unwrap().all_hold());
    assert_eq!(
        diamond_update(mu.source(), mu.on_states()).unwrap(),
        RelKernel::from_fn(c2.update())
    );
}

#[test]
fn wrong_parameter_update_fails_at_named_parameter() {
    let r = derive_interpretation(&common::e1()).unwrap();
    // c(y, θ) = θ instead of upd_M(θ)
    let stale = TotalFn::from_fn(r.update().dom(), r.params(), |i| i % 2).unwrap();
    let bad = Reasoner::new(
        r.params().clone(),
        r.observations().clone(),
        r.hidden().clone(),
        stale,
        r.interpretation().clone(),
        r.model().clone(),
    )
    .unwrap();
    let report = check_interpretation(&bad).unwrap();
    assert!(!report.consistency.holds);
    let at: Vec<&str> = report.consistency.witnesses.iter().map(|w| w.input.as_str()).collect();
    assert_eq!(at, ["m0", "m1"]);
    assert!(report.observations_ignored);
}

/// Hidden state never moves and is observed exactly.
fn exact_observer(
    hidden: &[&str],
    params: &[&str],
    psi_rows: &[(&str, Vec<&str>)],
    c: impl Fn(usize, usize) -> usize,
) -> Reasoner {
    let x = FinSet::new("X", hidden.to_vec()).unwrap();
    let y = x.relabel("Y");
    let theta = FinSet::new("T", params.to_vec()).unwrap();
    let psi = RelKernel::from_named(&theta, &x, psi_rows).unwrap();
    let n = x.len();
    let kappa = RelKernel::new(
        x.clone(),
        FinSet::pair(&x, &y).unwrap(),
        x.indices().map(|i| BTreeSet::from([pair_index(i, i, n)])).collect(),
    )
    .unwrap();
    let nt = theta.len();
    let update = TotalFn::from_fn(&FinSet::pair(&y, &theta).unwrap(), &theta, |i| c(i / nt, i % nt)).unwrap();
    Reasoner::new(theta, y, x, update, psi, kappa).unwrap()
}

#[test]
fn overlapping_beliefs_are_reported() {
    let r = exact_observer(
        &["a", "b", "c"],
        &["t0", "t1"],
        &[("t0", vec!["a", "b"]), ("t1", vec!["b", "c"])],
        |_, t| t,
    );
    let report = check_interpretation(&r).unwrap();
    assert!(!report.beliefs_disjoint);
    assert_eq!(report.overlaps, [(0, 1, 1)]);
    let oracle = (0..2).all(|t| {
        let (l, r) = consistency_oracle(&r, t);
        l == r
    });
    assert_eq!(report.consistency.holds, oracle);
    assert!(!oracle);
}

#[test]
fn observation_use_and_consistency_are_independent() {
    // Θ = {t0, ta, tb} with ψ(t0) = {a, b}, ψ(ta) = {a}, ψ(tb) = {b}; search
    // every c : Y × Θ → Θ
    let mut found = None;
    for code in 0..3usize.pow(6) {
        let table: Vec<usize> = (0..6).map(|k| (code / 3usize.pow(k as u32)) % 3).collect();
        let r = exact_observer(
            &["a", "b"],
            &["t0", "ta", "tb"],
            &[("t0", vec!["a", "b"]), ("ta", vec!["a"]), ("tb", vec!["b"])],
            |y, t| table[y * 3 + t],
        );
        let report = check_interpretation(&r).unwrap();
        let oracle = (0..3).all(|t| {
            let (l, r) = consistency_oracle(&r, t);
            l == r
        });
        assert_eq!(report.consistency.holds, oracle);
        if report.consistency.holds && !report.observations_ignored && found.is_none() {
            found = Some(table);
        }
    }
    let table = found.expect("a consistent reasoner that reads its observation");
    // the found update must send t0 to ta on a and to tb on b
    assert_eq!((table[0], table[3]), (1, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn theorem_chain_on_generated_models(seed in any::<u64>(), m in 1usize..=4, f in 1usize..=3) {
        let mu = common::random_model(seed, m, f);
        prop_assert!(mu.model_report().is_model());
        prop_assert!(check_indexed_model(&mu).unwrap().holds);
        let r = derive_interpretation(&mu).unwrap();
        let report = check_interpretation(&r).unwrap();
        prop_assert!(report.all_hold(), "{:?}", report);
        for t in r.params().indices() {
            let (l, rr) = consistency_oracle(&r, t);
            prop_assert_eq!(l, rr);
        }
        prop_assert_eq!(positivity_key_step(&mu).unwrap(), Positivity::Holds);
        let key = preimage_kernel(mu.on_states())
            .unwrap()
            .then(&diamond_update(mu.source(), mu.on_states()).unwrap())
            .unwrap()
            .then(&RelKernel::from_fn(mu.on_states()))
            .unwrap();
        prop_assert!(key.is_deterministic());
    }

    #[test]
    fn bijective_models_have_exact_diamond(seed in any::<u64>(), m in 1usize..=4) {
        let mu = common::random_model(seed, m, 1);
        prop_assert!(mu.on_states().is_bijective());
        prop_assert_eq!(
            diamond_update(mu.source(), mu.on_states()).unwrap(),
            RelKernel::from_fn(mu.source().update())
        );
    }
}

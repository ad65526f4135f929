//! Acceptance run: one PASS/FAIL line per criterion, all with exact
//! equality.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use imp_core::finsys::FinSet;
use imp_core::impkit::{run_pipeline, Autonomy, Status};
use imp_core::interp::{
    check_indexed_model, check_interpretation, derive_interpretation, diamond_update,
    imp_interpretations,
};
use imp_core::kernelcat::{
    bayes_invert_stoch, check_bayes_inverse, check_positivity_instance,
    consistency_sides, is_deterministic_equational, rat, Kernel, Markov, Positivity, Rational, RelKernel,
    StochKernel,
};
use imp_shell::{generate_model, parse_spec, print_decls, GenConfig, SpecDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> SpecDocument {
    let path = common::workspace().join("fixtures").join(name);
    parse_spec(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{what} took {took:?}, limit {limit:?}"));
    }
    Ok(())
}

fn theorem_chain() -> Outcome {
    let start = Instant::now();
    for seed in 0..200u64 {
        let cfg = GenConfig::for_suite(seed, 3).unwrap();
        let g = generate_model(cfg).map_err(|e| e.to_string())?;
        ensure!(g.mu.target().states().len() <= 4, "seed {seed}: |M| > 4");
        ensure!(g.mu.model_report().is_model(), "seed {seed}: not a model");
        ensure!(check_indexed_model(&g.mu).unwrap().holds, "seed {seed}: indexed model fails");
        let r = derive_interpretation(&g.mu).unwrap();
        ensure!(check_interpretation(&r).unwrap().consistency.holds, "seed {seed}: consistency fails");
    }
    within(start, Duration::from_secs(5), "200 seeds")?;
    Ok(format!("200 seeds in {:?}", start.elapsed()))
}

fn e1_fixture() -> Outcome {
    let doc = fixture("e1.sys");
    let mu = &doc.maps["mu"];
    let x = mu.source().states();
    let fibre = |m: usize| -> Vec<&str> { mu.fibre(m).into_iter().map(|i| x.name(i)).collect() };
    ensure!(fibre(0) == ["x0", "x2"] && fibre(1) == ["x1", "x3"], "fibres {:?} {:?}", fibre(0), fibre(1));
    let diamond = diamond_update(mu.source(), mu.on_states()).unwrap();
    ensure!(diamond.image_names(0) == ["x1", "x3"], "closure update of x0 is {:?}", diamond.image_names(0));
    let r = derive_interpretation(mu).unwrap();
    let c = RelKernel::from_fn(r.update());
    let (lhs, rhs) = consistency_sides(r.interpretation(), r.model(), &c).unwrap();
    let expected: BTreeSet<String> = ["x1", "x3"]
        .iter()
        .flat_map(|a| ["x0", "x2"].iter().map(move |b| format!("({a},{b})")))
        .collect();
    for (side, k) in [("left", &lhs), ("right", &rhs)] {
        let got: BTreeSet<String> = k.image_names(0).into_iter().map(String::from).collect();
        ensure!(got == expected, "{side} side at m0 is {got:?}");
    }
    Ok("fibres, closure update and both consistency sides at m0 match".into())
}

/// Tuples `(e, s, o, c)` of the tracking loop, simulated directly.
type Tuple = (usize, Option<usize>, usize, usize);

fn oracle_step((e, s, _, c): Tuple) -> Tuple {
    let (s2, o2) = if c == (e + 1) % 3 { (None, c) } else { (Some(e), c) };
    ((e + 1) % 3, s2, o2, s.unwrap_or((c + 1) % 3))
}

fn tuple_name((e, s, o, c): Tuple) -> String {
    let s = s.map_or("_|_".to_string(), |k| k.to_string());
    format!("({e},({s},{o}),{c})")
}

fn e2_fixture() -> Outcome {
    let start = Instant::now();
    let doc = fixture("e2.sys");
    let prob = &doc.problems["tracking"];
    let rep = run_pipeline(prob).unwrap();
    let a = rep.assumptions;
    ensure!(
        [a.composition, a.regulation, a.autonomous_controller, a.environment_iso] == [Status::Holds; 4],
        "assumptions {a:?}"
    );
    let witness = rep.attractor_witness().ok_or("no attractor")?;
    let horizon = rep.horizon().ok_or("no horizon")?;
    ensure!(witness.subset().len() == 3, "|S*| = {}", witness.subset().len());
    ensure!(horizon <= 4, "horizon {horizon}");

    // brute force over all 108 initial states
    let mut tuples = Vec::new();
    for e in 0..3 {
        for s in [None, Some(0), Some(1), Some(2)] {
            for o in 0..3 {
                for c in 0..3 {
                    tuples.push((e, s, o, c));
                }
            }
        }
    }
    ensure!(tuples.len() == 108, "tuple count");
    let full = &rep.full_system;
    for &t in &tuples {
        let k = full.states().lookup(&tuple_name(t)).map_err(|e| e.to_string())?;
        ensure!(full.states().name(full.step(k, 0)) == tuple_name(oracle_step(t)), "step from {}", tuple_name(t));
    }
    let in_target = |(e, s, o, _): Tuple| s.is_none() && o == e;
    let stays = |t: Tuple| {
        let mut y = t;
        (0..40).all(|_| {
            let ok = in_target(y);
            y = oracle_step(y);
            ok
        })
    };
    let oracle_star: BTreeSet<String> = tuples.iter().copied().filter(|&t| stays(t)).map(tuple_name).collect();
    let star: BTreeSet<String> = witness.names().into_iter().map(String::from).collect();
    ensure!(star == oracle_star, "S* {star:?} vs oracle {oracle_star:?}");
    let absorbed = tuples
        .iter()
        .map(|&t| {
            let mut y = t;
            let mut last_out = None;
            for step in 0..40 {
                if !oracle_star.contains(&tuple_name(y)) {
                    last_out = Some(step);
                }
                y = oracle_step(y);
            }
            last_out.map_or(0, |k| k + 1)
        })
        .max()
        .unwrap();
    ensure!(absorbed == horizon, "simulated worst case {absorbed} vs horizon {horizon}");

    let c_aut = rep.autonomous_controller().ok_or("no autonomous controller")?;
    let cs = c_aut.states();
    for k in cs.indices() {
        let next = cs.name(c_aut.step(k, 0)).parse::<usize>().unwrap();
        ensure!(next == (cs.name(k).parse::<usize>().unwrap() + 1) % 3, "controller cycle at {}", cs.name(k));
    }
    let (nu, nu_report) = rep.model_env.as_ref().ok_or("no environment model")?;
    ensure!(nu_report.is_model(), "nu is not a model");
    for (e, m) in nu.on_states().pairs() {
        ensure!(m.parse::<usize>().unwrap() == (e.parse::<usize>().unwrap() + 1) % 3, "nu({e}) = {m}");
    }
    let (full_r, env_r) = imp_interpretations(&rep).unwrap();
    for r in [Some(full_r), env_r].into_iter().map(|r| r.ok_or("missing reasoner")) {
        let report = check_interpretation(&r?).unwrap();
        ensure!(report.all_hold(), "reasoner report {report:?}");
    }
    within(start, Duration::from_secs(1), "tracking pipeline")?;
    Ok(format!("|S*| = 3, horizon {horizon} confirmed on 108 starts"))
}

fn negative_controls() -> Outcome {
    let run = common::impcheck(&["check", "model", "fixtures/e1_broken.sys", "--map", "mu"]);
    ensure!(run.code == 1, "broken parity clock exits {}", run.code);
    ensure!(run.stdout.contains("witness: at (x0, *)"), "no counterexample in\n{}", run.stdout);

    let doc = fixture("e2_input_dependent.sys");
    let prob = &doc.problems["tracking"];
    let rep = run_pipeline(prob).unwrap();
    let Some(Autonomy::Witness { c, p1, p2, next1, next2 }) = rep.autonomy.clone() else {
        return Err("no autonomy witness".into());
    };
    ensure!(next1 != next2, "witness does not disagree");
    let (cn, pn) = (prob.controller().states(), prob.plant().states());
    ensure!(
        (cn.name(c), pn.name(p1), pn.name(p2)) == ("0", "(_|_,0)", "(_|_,1)"),
        "witness ({}, {}, {})",
        cn.name(c),
        pn.name(p1),
        pn.name(p2)
    );
    ensure!(rep.model_full.is_none() && rep.model_env.is_none(), "models were emitted");
    ensure!(
        rep.theorem_full == Status::Skipped && rep.theorem_env == Status::Skipped,
        "theorems not skipped"
    );
    let run = common::impcheck(&["imp", "verify", "fixtures/e2_input_dependent.sys", "--problem", "tracking"]);
    ensure!(run.code == 1, "variant exits {}", run.code);
    ensure!(run.stdout.contains("SKIP controller model"), "controller model not suppressed");
    Ok("broken parity clock exits 1 with a counterexample; variant witness (0, (_|_,0), (_|_,1))".into())
}

fn random_stoch(rng: &mut ChaCha8Rng, dom: &FinSet, cod: &FinSet, dead_column: Option<usize>) -> StochKernel {
    let rows = dom
        .indices()
        .map(|_| {
            let mut w: Vec<i64> = cod.indices().map(|_| rng.gen_range(0..4)).collect();
            if let Some(d) = dead_column.filter(|_| cod.len() > 1) {
                w[d] = 0;
            }
            if w.iter().all(|&x| x == 0) {
                let k = if dead_column == Some(0) && cod.len() > 1 { 1 } else { 0 };
                w[k] = 1;
            }
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| rat(x, total)).collect()
        })
        .collect();
    StochKernel::new(dom.clone(), cod.clone(), rows).unwrap()
}

fn random_rel(rng: &mut ChaCha8Rng, dom: &FinSet, cod: &FinSet, max_row: usize) -> RelKernel {
    let rows = dom
        .indices()
        .map(|_| {
            let n = rng.gen_range(1..=max_row.min(cod.len()));
            let mut row = BTreeSet::new();
            while row.len() < n {
                row.insert(rng.gen_range(0..cod.len()));
            }
            row
        })
        .collect();
    RelKernel::new(dom.clone(), cod.clone(), rows).unwrap()
}

fn numbered(label: &str, n: usize) -> FinSet {
    FinSet::numbered(label, &label.to_lowercase(), n).unwrap()
}

fn finstoch_exactness() -> Outcome {
    let doc = fixture("kernels.sys");
    let (Kernel::Stoch(prior), Kernel::Stoch(flip)) = (&doc.kernels["prior"], &doc.kernels["flip"]) else {
        return Err("fixture kernels are not stochastic".into());
    };
    let post = bayes_invert_stoch(flip, prior).unwrap();
    ensure!(*post.kernel.weight(0, 0) == rat(3, 5), "posterior {}", post.kernel.weight(0, 0));
    ensure!(*post.kernel.weight(1, 0) == rat(1, 7), "posterior {}", post.kernel.weight(1, 0));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut zero_evidence = 0;
    for trial in 0..100 {
        let a = numbered("A", rng.gen_range(1..=6));
        let b = numbered("B", rng.gen_range(1..=6));
        let dead = (trial % 3 == 0).then(|| rng.gen_range(0..b.len()));
        let f = random_stoch(&mut rng, &a, &b, dead);
        let p = random_stoch(&mut rng, &FinSet::unit(), &a, None);
        let inv = bayes_invert_stoch(&f, &p).unwrap();
        ensure!(check_bayes_inverse(&f, &p, &inv.kernel).unwrap().holds, "trial {trial}: joint differs");
        // independent joint: p(x) f(y|x) = e(y) f†(x|y)
        for y in b.indices() {
            let evidence: Rational = a.indices().map(|x| p.weight(0, x) * f.weight(x, y)).sum();
            if evidence == rat(0, 1) {
                zero_evidence += 1;
                ensure!(inv.convention_rows.contains(&y), "trial {trial}: row {y} not flagged");
            }
            for x in a.indices() {
                ensure!(
                    p.weight(0, x) * f.weight(x, y) == &evidence * inv.kernel.weight(y, x),
                    "trial {trial}: joint at ({x}, {y})"
                );
            }
        }
    }
    ensure!(zero_evidence > 0, "no zero-evidence rows were exercised");
    Ok(format!("posterior 3/5; 100 random pairs, {zero_evidence} zero-evidence rows"))
}

fn laws_for<K: Markov>(kernels: &mut dyn FnMut(&FinSet, &FinSet) -> K, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for trial in 0..100 {
        let a = numbered("A", rng.gen_range(1..=6));
        let b = numbered("B", rng.gen_range(1..=6));
        let c = numbered("C", rng.gen_range(1..=6));
        let (id, copy, del) = (K::identity(&a), K::copy(&a).unwrap(), K::del(&a));
        ensure!(copy.then(&del.tensor(&id).unwrap()).unwrap() == id, "trial {trial}: left counit");
        ensure!(copy.then(&id.tensor(&del).unwrap()).unwrap() == id, "trial {trial}: right counit");
        ensure!(
            copy.then(&copy.tensor(&id).unwrap()).unwrap() == copy.then(&id.tensor(&copy).unwrap()).unwrap(),
            "trial {trial}: coassociativity"
        );
        ensure!(copy.then(&K::swap(&a, &a).unwrap()).unwrap() == copy, "trial {trial}: cocommutativity");

        let f = kernels(&a, &b);
        let g = kernels(&b, &c);
        let h = kernels(&c, &a);
        let k = kernels(&a, &c);
        let lhs = f.then(&g).unwrap().tensor(&h.then(&k).unwrap()).unwrap();
        let rhs = f.tensor(&h).unwrap().then(&g.tensor(&k).unwrap()).unwrap();
        ensure!(lhs == rhs, "trial {trial}: interchange");
        let swap = K::swap(&a, &c).unwrap();
        ensure!(
            swap.then(&K::swap(&c, &a).unwrap()).unwrap() == K::identity(&FinSet::pair(&a, &c).unwrap()),
            "trial {trial}: swap involution"
        );
        ensure!(f.then(&K::del(&b)).unwrap() == K::del(&a), "trial {trial}: naturality of delete");
        for kern in [&f, &g, &h, &k] {
            ensure!(
                kern.is_deterministic() == is_deterministic_equational(kern).unwrap(),
                "trial {trial}: determinism criteria disagree"
            );
        }
    }
    Ok(())
}

fn categorical_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rel_rng = ChaCha8Rng::seed_from_u64(60);
    // every fourth relation is a function so both sides of the determinism
    // equivalence are exercised
    let mut count = 0;
    laws_for::<RelKernel>(
        &mut |d, c| {
            count += 1;
            random_rel(&mut rel_rng, d, c, if count % 4 == 0 { 1 } else { 3 })
        },
        &mut rng,
    )?;
    let mut stoch_rng = ChaCha8Rng::seed_from_u64(61);
    let mut count = 0;
    laws_for::<StochKernel>(
        &mut |d, c| {
            count += 1;
            if count % 4 == 0 {
                StochKernel::from_fn(&random_rel(&mut stoch_rng, d, c, 1).as_function().unwrap())
            } else {
                random_stoch(&mut stoch_rng, d, c, None)
            }
        },
        &mut rng,
    )?;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < 100 {
        attempts += 1;
        ensure!(attempts < 1_000_000, "too few deterministic composites");
        let a = numbered("A", rng.gen_range(1..=6));
        let b = numbered("B", rng.gen_range(1..=6));
        let c = numbered("C", rng.gen_range(1..=6));
        let f = random_rel(&mut rng, &a, &b, 2);
        let g = random_rel(&mut rng, &b, &c, 2);
        if !f.then(&g).unwrap().is_deterministic() {
            continue;
        }
        accepted += 1;
        match check_positivity_instance(&f, &g).unwrap() {
            Positivity::Holds => {}
            other => return Err(format!("positivity instance {accepted}: {other:?}")),
        }
    }
    within(start, Duration::from_secs(10), "law suite")?;
    Ok(format!("100 kernels per flavor, 100 positivity pairs from {attempts} draws in {:?}", start.elapsed()))
}

fn parser_round_trip() -> Outcome {
    let fixtures = common::fixtures();
    ensure!(fixtures.len() >= 5, "only {} fixtures", fixtures.len());
    for path in &fixtures {
        let text = std::fs::read_to_string(path).unwrap();
        let doc = parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = print_decls(&doc.decls);
        let again = parse_spec(&printed).map_err(|e| format!("{} reprinted: {e}", path.display()))?;
        ensure!(again == doc, "{}: declarations differ", path.display());
        ensure!(
            again.systems == doc.systems && again.maps == doc.maps && again.kernels == doc.kernels,
            "{}: resolved objects differ",
            path.display()
        );
        ensure!(print_decls(&again.decls) == printed, "{}: printing is not stable", path.display());
    }
    let mut codes = BTreeSet::new();
    for g in common::GOLDEN {
        common::check_golden(g)?;
        codes.insert(g.code);
    }
    ensure!(codes == BTreeSet::from([0, 1, 2]), "exit classes covered: {codes:?}");
    Ok(format!("{} fixtures round-trip; {} golden cases cover exits 0, 1, 2", fixtures.len(), common::GOLDEN.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("theorem chain on 200 generated models", theorem_chain),
        ("parity clock fibres, closure and consistency", e1_fixture),
        ("tracking loop pipeline against brute-force simulation", e2_fixture),
        ("negative controls", negative_controls),
        ("exact stochastic inversion", finstoch_exactness),
        ("categorical laws and positivity", categorical_laws),
        ("parser round trip and exit classes", parser_round_trip),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

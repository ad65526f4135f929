//! Command implementations. Each returns a report; ill-formed input is an
//! error instead.

use std::collections::BTreeMap;
use std::path::Path;

use imp_core::finsys::{FinSet, SystemMap};
use imp_core::impkit::{run_pipeline, AttractorOutcome, Autonomy, Status};
use imp_core::interp::{
    check_indexed_model, check_interpretation, derive_interpretation, diamond_update,
    positivity_key_step, preimage_kernel, InterpretationReport, Reasoner,
};
use imp_core::kernelcat::{compare, eval_expr, EquationCheck, Flavor, Kernel, Markov, Positivity};
use imp_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::document::{parse_spec, SpecDocument};
use crate::error::ShellError;
use crate::gen::{generate_model, reasoner_decls, GenConfig};
use crate::parser::parse_kernel_expr;
use crate::printer::print_decls;
use crate::report::{Check, Report};

pub type CmdResult<T> = Result<T, ShellError>;

pub fn load(path: &Path) -> CmdResult<SpecDocument> {
    let text = std::fs::read_to_string(path).map_err(|source| ShellError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_spec(&text)?)
}

fn write_file(path: &Path, text: &str) -> CmdResult<()> {
    std::fs::write(path, text).map_err(|source| ShellError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn lookup<'a, T>(table: &'a BTreeMap<String, T>, kind: &str, name: &str) -> CmdResult<&'a T> {
    table
        .get(name)
        .ok_or_else(|| ShellError::Usage(format!("no {kind} named `{name}` in the document")))
}

fn names(set: &FinSet, items: impl IntoIterator<Item = usize>) -> Vec<String> {
    items.into_iter().map(|i| set.name(i).to_string()).collect()
}

fn equation_witnesses(check: &EquationCheck) -> Vec<String> {
    check.witnesses.iter().map(|w| w.to_string()).collect()
}

fn table_fact(pairs: Vec<(&str, &str)>) -> Value {
    Value::Object(pairs.into_iter().map(|(a, b)| (a.to_string(), json!(b))).collect())
}

/// `(x, i)` where `f(upd(x, i)) ≠ upd'(f(x), f_i(x, i))`, in words.
fn square_witnesses(map: &SystemMap, cells: &[(usize, usize)]) -> Vec<String> {
    let (src, tgt) = (map.source(), map.target());
    let ni = src.inputs().len();
    cells
        .iter()
        .map(|&(x, i)| {
            let lhs = map.on_states().apply(src.step(x, i));
            let j = map.on_inputs().apply(x * ni + i);
            let rhs = tgt.step(map.on_states().apply(x), j);
            format!(
                "at ({}, {}): image of next state is {}, next image state is {}",
                src.states().name(x),
                src.inputs().name(i),
                tgt.states().name(lhs),
                tgt.states().name(rhs)
            )
        })
        .collect()
}

pub fn check_system(doc: &SpecDocument, name: &str) -> CmdResult<Report> {
    let sys = lookup(&doc.systems, "system", name)?;
    let mut r = Report::new("check system", name);
    r.check(Check::pass(
        "update is total",
        format!("{} entries", sys.states().len() * sys.inputs().len()),
    ));
    r.fact("states", sys.states().len());
    r.fact("inputs", sys.inputs().len());
    r.fact("autonomous", sys.is_autonomous());
    Ok(r)
}

pub fn check_map(doc: &SpecDocument, name: &str) -> CmdResult<Report> {
    let map = lookup(&doc.maps, "map", name)?;
    let mut r = Report::new("check map", name);
    let c = map.check();
    r.check(Check::verdict(
        "square commutes",
        c.commutes,
        format!("{} violating cells", c.counterexamples.len()),
        square_witnesses(map, &c.counterexamples),
    ));
    Ok(r)
}

fn model_checks(r: &mut Report, map: &SystemMap) {
    let m = map.model_report();
    let (src, tgt) = (map.source(), map.target());
    r.check(Check::verdict(
        "surjective on states",
        m.surjective_on_states,
        "",
        names(tgt.states(), m.unhit_states.iter().copied())
            .into_iter()
            .map(|s| format!("{s} has an empty fibre"))
            .collect(),
    ));
    r.check(Check::verdict(
        "fibrewise surjective on inputs",
        m.fibrewise_surjective_on_inputs,
        "",
        m.input_gaps
            .iter()
            .map(|&(x, j)| format!("input {} is not reached from {}", tgt.inputs().name(j), src.states().name(x)))
            .collect(),
    ));
    r.check(Check::verdict(
        "square commutes",
        m.square_commutes,
        format!("{} violating cells", m.counterexamples.len()),
        square_witnesses(map, &m.counterexamples),
    ));
    let fibres: serde_json::Map<String, Value> = tgt
        .states()
        .indices()
        .map(|k| (tgt.states().name(k).to_string(), json!(names(src.states(), map.fibre(k)))))
        .collect();
    r.fact("fibres", Value::Object(fibres));
}

pub fn check_model(doc: &SpecDocument, name: &str) -> CmdResult<Report> {
    let map = lookup(&doc.maps, "map", name)?;
    let mut r = Report::new("check model", name);
    model_checks(&mut r, map);
    Ok(r)
}

fn status_check(name: &str, status: Status, detail: impl Into<String>, witnesses: Vec<String>) -> Check {
    match status {
        Status::Holds => Check::pass(name, detail),
        Status::Fails => Check::fail(name, detail, witnesses),
        Status::Skipped => Check::skipped(name, "an earlier stage failed"),
    }
}

fn interpretation_checks(r: &mut Report, prefix: &str, rs: &Reasoner, rep: &InterpretationReport) {
    let p = |s: &str| if prefix.is_empty() { s.to_string() } else { format!("{prefix} {s}") };
    r.check(Check::verdict(
        p("consistency"),
        rep.consistency.holds,
        "",
        equation_witnesses(&rep.consistency),
    ));
    let (t, x, y) = (rs.params(), rs.hidden(), rs.observations());
    r.check(Check::verdict(
        p("beliefs disjoint"),
        rep.beliefs_disjoint,
        "",
        rep.overlaps
            .iter()
            .map(|&(a, b, h)| format!("{} and {} both contain {}", t.name(a), t.name(b), x.name(h)))
            .collect(),
    ));
    r.check(Check::verdict(
        p("observations ignored"),
        rep.observations_ignored,
        "",
        rep.observation_uses
            .iter()
            .map(|&(th, y1, y2)| {
                format!(
                    "at {}: observation {} gives {}, observation {} gives {}",
                    t.name(th),
                    y.name(y1),
                    t.name(rs.next_param(y1, th)),
                    y.name(y2),
                    t.name(rs.next_param(y2, th))
                )
            })
            .collect(),
    ));
}

pub fn imp_verify(doc: &SpecDocument, name: &str) -> CmdResult<Report> {
    let prob = lookup(&doc.problems, "problem", name)?;
    let rep = run_pipeline(prob)?;
    let full = rep.full_system.states();
    let a = rep.assumptions;
    let mut r = Report::new("imp verify", name);
    r.fact("full states", full.len());
    r.fact("lifted targets", rep.lifted_targets.len());

    r.check(status_check("assumption composition", a.composition, "environment, plant and controller compose", vec![]));
    let regulation_witnesses = match &rep.attractor {
        AttractorOutcome::Found { .. } => vec![],
        AttractorOutcome::Empty => vec!["no nonempty invariant subset inside the targets".into()],
        AttractorOutcome::NotAttracting { stranded, .. } => names(full, stranded.iter().copied())
            .into_iter()
            .map(|s| format!("{s} is not guaranteed to reach the candidate"))
            .collect(),
        AttractorOutcome::OutsideTargets { states } => names(full, states.iter().copied())
            .into_iter()
            .map(|s| format!("{s} lies outside the targets"))
            .collect(),
        AttractorOutcome::NotInvariant { state } => vec![format!("{} leaves the candidate", full.name(*state))],
    };
    let regulation_detail = match rep.attractor.found() {
        Some((w, h)) => format!("|S*| = {}, horizon {h}", w.subset().len()),
        None => "no regulated attractor".into(),
    };
    r.check(status_check("assumption regulation", a.regulation, regulation_detail, regulation_witnesses));
    if let Some((w, h)) = rep.attractor.found() {
        r.fact("attractor", w.names());
        r.fact("horizon", h);
    }

    let ctrl = prob.controller().states();
    let plant = prob.plant().states();
    let mut autonomy_witnesses = Vec::new();
    if let Some(ac) = &rep.controller {
        autonomy_witnesses.extend(ac.closure_defect.iter().map(|&(c, p)| {
            format!("from {} under {} the controller leaves C*", ctrl.name(c), plant.name(p))
        }));
        r.fact("controller states", ac.states.names().to_vec());
        r.fact("controller inputs", ac.inputs.names().to_vec());
    }
    if let Some(Autonomy::Witness { c, p1, p2, next1, next2 }) = &rep.autonomy {
        autonomy_witnesses.push(format!(
            "at {}: input {} gives {}, input {} gives {}",
            ctrl.name(*c),
            plant.name(*p1),
            ctrl.name(*next1),
            plant.name(*p2),
            ctrl.name(*next2)
        ));
    }
    r.check(status_check(
        "assumption autonomous controller",
        a.autonomous_controller,
        "the restricted controller ignores the plant",
        autonomy_witnesses,
    ));
    if let Some(c_aut) = rep.autonomous_controller() {
        r.fact("autonomous controller", table_fact(c_aut.update().pairs()));
    }

    let mut iso_witnesses = Vec::new();
    if let Some(iso) = &rep.env_iso {
        iso_witnesses.extend(iso.collisions.iter().map(|&(s1, s2)| {
            format!("{} and {} share an environment state", full.name(s1), full.name(s2))
        }));
        if !iso.commutes {
            iso_witnesses.push("the projection to the environment does not commute with the updates".into());
        }
    }
    if let Some(env) = &rep.environment {
        r.fact("environment states", env.system.states().names().to_vec());
    }
    r.check(status_check(
        "assumption environment isomorphism",
        a.environment_iso,
        "the attractor projects bijectively onto E*",
        iso_witnesses,
    ));

    match rep.autonomisation_commutes {
        Some(ok) => r.check(Check::verdict(
            "autonomisation square",
            ok,
            "",
            vec!["projection then autonomisation differs from the direct projection".into()],
        )),
        None => r.check(Check::skipped("autonomisation square", "an earlier stage failed")),
    }

    for (label, status, model) in [
        ("controller model", rep.theorem_full, &rep.model_full),
        ("environment model", rep.theorem_env, &rep.model_env),
    ] {
        match (status, model) {
            (Status::Holds, Some((map, m))) => {
                let mut sub = Report::new("", "");
                model_checks(&mut sub, map);
                let witnesses: Vec<String> = sub.checks.iter().flat_map(|c| c.witnesses.clone()).collect();
                r.check(Check::verdict(label, m.is_model(), "", witnesses));
                if label == "environment model" {
                    r.fact("nu", table_fact(map.on_states().pairs()));
                }
            }
            _ => r.check(Check::skipped(label, "hypotheses not met")),
        }
    }

    for (label, model) in [("attractor reasoner", &rep.model_full), ("environment reasoner", &rep.model_env)] {
        if let Some((map, _)) = model.as_ref().filter(|(_, m)| m.is_model()) {
            let rs = derive_interpretation(map)?;
            let ir = check_interpretation(&rs)?;
            interpretation_checks(&mut r, label, &rs, &ir);
        }
    }
    Ok(r)
}

pub fn interp_derive(doc: &SpecDocument, name: &str, emit: Option<&Path>) -> CmdResult<Report> {
    let map = lookup(&doc.maps, "map", name)?;
    let mut r = Report::new("interp derive", name);
    model_checks(&mut r, map);
    if !r.passed {
        return Ok(r);
    }
    let src = map.source();
    if !src.is_autonomous() || !map.target().is_autonomous() {
        return Err(Error::NotAutonomous("interpretations need autonomous source and target".into()).into());
    }
    let ix = check_indexed_model(map)?;
    r.check(Check::verdict("indexed model", ix.holds, "", equation_witnesses(&ix)));
    let rs = derive_interpretation(map)?;
    let ir = check_interpretation(&rs)?;
    interpretation_checks(&mut r, "", &rs, &ir);
    match positivity_key_step(map)? {
        Positivity::Holds => r.check(Check::pass("positivity key step", "")),
        Positivity::Vacuous => r.check(Check::pass("positivity key step", "vacuous: composite not deterministic")),
        Positivity::Fails(check) => r.check(Check::fail("positivity key step", "", equation_witnesses(&check))),
    }
    let psi = preimage_kernel(map.on_states())?;
    let diamond = diamond_update(src, map.on_states())?;
    let rows = |k: &imp_core::kernelcat::RelKernel| -> Value {
        Value::Object(
            k.dom()
                .indices()
                .map(|i| (k.dom().name(i).to_string(), json!(k.image_names(i))))
                .collect(),
        )
    };
    r.fact("interpretation", rows(&psi));
    r.fact("closure update", rows(&diamond));
    if let Some(path) = emit {
        write_file(path, &print_decls(&reasoner_decls("r", &rs)))?;
        r.fact("emitted", path.display().to_string());
    }
    Ok(r)
}

pub fn interp_check(doc: &SpecDocument, name: &str) -> CmdResult<Report> {
    let rs = lookup(&doc.reasoners, "reasoner", name)?;
    let mut r = Report::new("interp check", name);
    let ir = check_interpretation(rs)?;
    interpretation_checks(&mut r, "", rs, &ir);
    Ok(r)
}

fn kernel_rows(k: &Kernel) -> Value {
    Value::Object(
        k.dom()
            .indices()
            .map(|x| (k.dom().name(x).to_string(), json!(k.describe_row(x))))
            .collect(),
    )
}

pub fn kernel_eval(doc: &SpecDocument, expr: &str, flavor: Flavor, against: Option<&str>) -> CmdResult<Report> {
    let env = doc.expr_env();
    let e = parse_kernel_expr(expr)?;
    let k = eval_expr(&e, &env, flavor)?;
    let mut r = Report::new("kernel eval", e.to_string());
    r.fact("domain", k.dom().describe());
    r.fact("codomain", k.cod().describe());
    r.fact("rows", kernel_rows(&k));
    let deterministic = match &k {
        Kernel::Rel(k) => k.is_deterministic(),
        Kernel::Stoch(k) => k.is_deterministic(),
    };
    r.fact("deterministic", deterministic);
    if let Some(other) = against {
        let e2 = parse_kernel_expr(other)?;
        let k2 = eval_expr(&e2, &env, flavor)?;
        let check = match (&k, &k2) {
            (Kernel::Rel(a), Kernel::Rel(b)) => compare("equality", a, b)?,
            (Kernel::Stoch(a), Kernel::Stoch(b)) => compare("equality", a, b)?,
            _ => return Err(Error::Internal("flavours diverged during evaluation".into()).into()),
        };
        r.check(Check::verdict(
            format!("equals {e2}"),
            check.holds,
            "",
            equation_witnesses(&check),
        ));
    }
    Ok(r)
}

/// Generates one model; the document is written to `out` when given.
pub fn gen_model(cfg: GenConfig, out: Option<&Path>) -> CmdResult<(Report, String)> {
    let g = generate_model(cfg)?;
    let text = print_decls(&g.decls());
    let mut r = Report::new("gen model", format!("seed {}", cfg.seed));
    model_checks(&mut r, &g.mu);
    r.fact("fine states", g.mu.source().states().len());
    r.fact("coarse states", g.mu.target().states().len());
    if let Some(path) = out {
        write_file(path, &text)?;
        r.fact("written", path.display().to_string());
    }
    Ok((r, text))
}

/// Outcome of the theorem chain for one seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedOutcome {
    pub seed: u64,
    pub model: bool,
    pub indexed_model: bool,
    pub consistency: bool,
    pub positivity: bool,
}

pub fn theorem_chain(cfg: GenConfig) -> imp_core::Result<SeedOutcome> {
    let g = generate_model(cfg)?;
    let model = g.mu.model_report().is_model();
    let indexed_model = check_indexed_model(&g.mu)?.holds;
    let consistency = check_interpretation(&derive_interpretation(&g.mu)?)?.consistency.holds;
    let positivity = positivity_key_step(&g.mu)? == Positivity::Holds;
    Ok(SeedOutcome {
        seed: cfg.seed,
        model,
        indexed_model,
        consistency,
        positivity,
    })
}

/// Runs the theorem chain on `count` consecutive seeds, on `jobs` threads;
/// results are merged in seed order.
pub fn gen_suite(start: u64, count: u64, max_fibre: usize, jobs: usize) -> CmdResult<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ShellError::Usage(format!("cannot start worker threads: {e}")))?;
    let outcomes: Vec<SeedOutcome> = pool.install(|| {
        (start..start + count)
            .into_par_iter()
            .map(|seed| theorem_chain(GenConfig::for_suite(seed, max_fibre)?))
            .collect::<imp_core::Result<Vec<_>>>()
    })?;
    let mut r = Report::new("gen suite", format!("seeds {start}..{}", start + count));
    type Pick = fn(&SeedOutcome) -> bool;
    let props: [(&str, Pick); 4] = [
        ("model", |o| o.model),
        ("indexed model", |o| o.indexed_model),
        ("consistency", |o| o.consistency),
        ("positivity key step", |o| o.positivity),
    ];
    for (name, pick) in props {
        let failed: Vec<String> = outcomes.iter().filter(|o| !pick(o)).map(|o| format!("seed {}", o.seed)).collect();
        let detail = format!("{}/{} seeds", outcomes.len() - failed.len(), outcomes.len());
        r.check(Check::verdict(name, failed.is_empty(), detail, failed));
    }
    Ok(r)
}

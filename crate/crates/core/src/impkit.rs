//! The regulation pipeline: compose environment, plant and controller into
//! an autonomous full system, find the regulated attractor inside the lifted
//! targets, restrict the controller and environment to it, and build the
//! two model maps of the internal model principle.
//!
//! Full-system states are triples `(e, p, c)` laid out row-major over
//! `E × P × C`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::finsys::{FinSet, ModelReport, StateSet, SubsystemWitness, System, SystemMap, TotalFn};

/// Environment, plant, controller and a target set `K̃ ⊆ E × P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegulationProblem {
    env: System,
    plant: System,
    controller: System,
    targets: BTreeSet<(usize, usize)>,
    attractor: Option<StateSet>,
}

impl RegulationProblem {
    /// Validates the interfaces: the environment is autonomous, the plant
    /// reads `E × C` and the controller reads `P`.
    pub fn new(
        env: System,
        plant: System,
        controller: System,
        targets: BTreeSet<(usize, usize)>,
    ) -> Result<RegulationProblem> {
        if !env.is_autonomous() {
            return Err(Error::NotAutonomous(format!(
                "environment has inputs {}",
                env.inputs().describe()
            )));
        }
        let plant_inputs = FinSet::pair(env.states(), controller.states())?;
        if *plant.inputs() != plant_inputs {
            return Err(Error::TypeMismatch {
                context: "plant inputs".into(),
                expected: plant_inputs.describe(),
                found: plant.inputs().describe(),
            });
        }
        if controller.inputs() != plant.states() {
            return Err(Error::TypeMismatch {
                context: "controller inputs".into(),
                expected: plant.states().describe(),
                found: controller.inputs().describe(),
            });
        }
        for &(e, p) in &targets {
            if e >= env.states().len() || p >= plant.states().len() {
                return Err(Error::ImageOutOfRange {
                    what: "targets".into(),
                    index: e.max(p),
                    size: env.states().len().min(plant.states().len()),
                });
            }
        }
        Ok(RegulationProblem {
            env,
            plant,
            controller,
            targets,
            attractor: None,
        })
    }

    /// Looks targets up by element name.
    pub fn from_named_targets<A: AsRef<str>, B: AsRef<str>>(
        env: System,
        plant: System,
        controller: System,
        targets: &[(A, B)],
    ) -> Result<RegulationProblem> {
        let targets = targets
            .iter()
            .map(|(e, p)| {
                Ok((
                    env.states().lookup(e.as_ref())?,
                    plant.states().lookup(p.as_ref())?,
                ))
            })
            .collect::<Result<BTreeSet<_>>>()?;
        RegulationProblem::new(env, plant, controller, targets)
    }

    /// Supplies an attractor to validate instead of computing the maximal one.
    pub fn with_attractor(mut self, attractor: StateSet) -> Result<RegulationProblem> {
        let n = self.full_states()?.len();
        if let Some(&s) = attractor.iter().find(|&&s| s >= n) {
            return Err(Error::ImageOutOfRange {
                what: "attractor".into(),
                index: s,
                size: n,
            });
        }
        self.attractor = Some(attractor);
        Ok(self)
    }

    pub fn env(&self) -> &System {
        &self.env
    }

    pub fn plant(&self) -> &System {
        &self.plant
    }

    pub fn controller(&self) -> &System {
        &self.controller
    }

    pub fn targets(&self) -> &BTreeSet<(usize, usize)> {
        &self.targets
    }

    pub fn attractor(&self) -> Option<&StateSet> {
        self.attractor.as_ref()
    }

    /// The product `E × P × C`.
    pub fn full_states(&self) -> Result<FinSet> {
        FinSet::product(&[
            self.env.states().clone(),
            self.plant.states().clone(),
            self.controller.states().clone(),
        ])
    }

    /// Splits a full-system index into `(e, p, c)`.
    pub fn split(&self, s: usize) -> (usize, usize, usize) {
        let (np, nc) = (self.plant.states().len(), self.controller.states().len());
        (s / (np * nc), (s / nc) % np, s % nc)
    }

    pub fn join(&self, e: usize, p: usize, c: usize) -> usize {
        let (np, nc) = (self.plant.states().len(), self.controller.states().len());
        (e * np + p) * nc + c
    }
}

/// The autonomous composite `upd(e, p, c) = (upd_E(e), upd_P(p, (e, c)), upd_C(c, p))`.
pub fn assemble_full_system(prob: &RegulationProblem) -> Result<System> {
    let states = prob.full_states()?;
    let nc = prob.controller.states().len();
    System::autonomous(&states, |s| {
        let (e, p, c) = prob.split(s);
        prob.join(
            prob.env.step(e, 0),
            prob.plant.step(p, e * nc + c),
            prob.controller.step(c, p),
        )
    })
}

/// `K = {(e, p, c) : (e, p) ∈ K̃}`.
pub fn lift_targets(prob: &RegulationProblem) -> StateSet {
    let nc = prob.controller.states().len();
    prob.targets
        .iter()
        .flat_map(|&(e, p)| (0..nc).map(move |c| prob.join(e, p, c)))
        .collect()
}

/// Outcome of the search for a regulated attractor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttractorOutcome {
    /// An attracting subsystem inside the targets, with its horizon.
    Found {
        witness: SubsystemWitness,
        horizon: usize,
    },
    /// The largest subsystem inside the targets is empty.
    Empty,
    /// The candidate subsystem does not attract every state.
    NotAttracting {
        candidate: StateSet,
        stranded: Vec<usize>,
    },
    /// A supplied attractor contains states outside the targets.
    OutsideTargets { states: Vec<usize> },
    /// A supplied attractor is not forward-invariant.
    NotInvariant { state: usize },
}

impl AttractorOutcome {
    pub fn found(&self) -> Option<(&SubsystemWitness, usize)> {
        match self {
            AttractorOutcome::Found { witness, horizon } => Some((witness, *horizon)),
            _ => None,
        }
    }
}

fn attracting_outcome(full: &System, candidate: StateSet) -> Result<AttractorOutcome> {
    let report = full.attraction(&candidate)?;
    if !report.attracting {
        return Ok(AttractorOutcome::NotAttracting {
            candidate,
            stranded: report.stranded,
        });
    }
    Ok(AttractorOutcome::Found {
        witness: SubsystemWitness::new(full.clone(), candidate)?,
        horizon: report.horizon.expect("attracting"),
    })
}

/// The maximal subsystem inside `K` (greatest fixpoint), accepted when it is
/// nonempty and attracting.
pub fn find_regulated_attractor(full: &System, lifted: &StateSet) -> Result<AttractorOutcome> {
    let candidate = full.largest_invariant_subset(lifted);
    if candidate.is_empty() {
        return Ok(AttractorOutcome::Empty);
    }
    attracting_outcome(full, candidate)
}

/// Validates a supplied attractor against the targets and the dynamics.
pub fn validate_attractor(
    full: &System,
    lifted: &StateSet,
    candidate: &StateSet,
) -> Result<AttractorOutcome> {
    if candidate.is_empty() {
        return Ok(AttractorOutcome::Empty);
    }
    let outside: Vec<usize> = candidate.difference(lifted).copied().collect();
    if !outside.is_empty() {
        return Ok(AttractorOutcome::OutsideTargets { states: outside });
    }
    if let Some((x, _)) = full.find_escape(candidate) {
        return Ok(AttractorOutcome::NotInvariant { state: x });
    }
    attracting_outcome(full, candidate.clone())
}

/// The controller restricted to the attractor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractingController {
    /// Controller states occurring on the attractor, as an atomic set.
    pub states: FinSet,
    /// Plant states occurring on the attractor, as an atomic set.
    pub inputs: FinSet,
    /// Indices into the controller's states, in the order of `states`.
    pub state_members: Vec<usize>,
    /// Indices into the plant's states, in the order of `inputs`.
    pub input_members: Vec<usize>,
    /// `upd_C(c, p)` for every `(c, p) ∈ C* × P*`, as a controller index.
    pub table: BTreeMap<(usize, usize), usize>,
    /// Pairs of `C* × P*` (controller and plant indices) sent outside `C*`.
    pub closure_defect: Vec<(usize, usize)>,
}

impl AttractingController {
    fn position(&self, c: usize) -> Option<usize> {
        self.state_members.binary_search(&c).ok()
    }

    /// The restricted controller with inputs `P*`. Fails when the closure
    /// defect is nonempty.
    pub fn system(&self) -> Result<System> {
        if let Some(&(c, p)) = self.closure_defect.first() {
            return Err(Error::Precondition(format!(
                "controller leaves C* at ({}, {})",
                self.states_name(c),
                self.inputs_name(p)
            )));
        }
        System::from_rule(&self.states, &self.inputs, |k, j| {
            let next = self.table[&(self.state_members[k], self.input_members[j])];
            self.position(next).expect("no closure defect")
        })
    }

    fn inputs_name(&self, p: usize) -> String {
        self.input_members
            .binary_search(&p)
            .map(|j| self.inputs.name(j).to_string())
            .unwrap_or_else(|_| format!("#{p}"))
    }

    fn states_name(&self, c: usize) -> String {
        self.position(c)
            .map(|k| self.states.name(k).to_string())
            .unwrap_or_else(|| format!("#{c}"))
    }
}

fn members_of(prob: &RegulationProblem, attractor: &SubsystemWitness) -> Vec<(usize, usize, usize)> {
    attractor.members().into_iter().map(|s| prob.split(s)).collect()
}

/// `C*` and `P*` are the controller and plant projections of the attractor;
/// the update is tabulated on all of `C* × P*`.
pub fn attracting_controller(
    prob: &RegulationProblem,
    attractor: &SubsystemWitness,
) -> Result<AttractingController> {
    let triples = members_of(prob, attractor);
    let cs: BTreeSet<usize> = triples.iter().map(|t| t.2).collect();
    let ps: BTreeSet<usize> = triples.iter().map(|t| t.1).collect();
    let state_members: Vec<usize> = cs.iter().copied().collect();
    let input_members: Vec<usize> = ps.iter().copied().collect();
    let mut table = BTreeMap::new();
    let mut closure_defect = Vec::new();
    for &c in &state_members {
        for &p in &input_members {
            let next = prob.controller.step(c, p);
            table.insert((c, p), next);
            if !cs.contains(&next) {
                closure_defect.push((c, p));
            }
        }
    }
    Ok(AttractingController {
        states: prob.controller.states().subset("C*", &state_members)?,
        inputs: prob.plant.states().subset("P*", &input_members)?,
        state_members,
        input_members,
        table,
        closure_defect,
    })
}

/// Either the autonomous controller or a witness that the update depends on
/// the plant state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Autonomy {
    Autonomous(System),
    /// `upd_C(c, p1) ≠ upd_C(c, p2)`; all entries are original indices.
    Witness {
        c: usize,
        p1: usize,
        p2: usize,
        next1: usize,
        next2: usize,
    },
}

/// Builds `C*aut` when the restricted update ignores its input.
pub fn autonomize_controller(ac: &AttractingController) -> Result<Autonomy> {
    if !ac.closure_defect.is_empty() {
        return Err(Error::Precondition(
            "attracting controller has a nonempty closure defect".into(),
        ));
    }
    let mut next = Vec::with_capacity(ac.state_members.len());
    for &c in &ac.state_members {
        let p1 = ac.input_members[0];
        let n1 = ac.table[&(c, p1)];
        for &p2 in &ac.input_members[1..] {
            let n2 = ac.table[&(c, p2)];
            if n1 != n2 {
                return Ok(Autonomy::Witness {
                    c,
                    p1,
                    p2,
                    next1: n1,
                    next2: n2,
                });
            }
        }
        next.push(ac.position(n1).expect("no closure defect"));
    }
    let states = ac.states.relabel("C*aut");
    Ok(Autonomy::Autonomous(System::autonomous(&states, |k| next[k])?))
}

/// The environment restricted to the environment states on the attractor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractingEnvironment {
    pub system: System,
    /// Indices into the environment's states, in the order of the states of
    /// `system`.
    pub members: Vec<usize>,
}

pub fn attracting_environment(
    prob: &RegulationProblem,
    attractor: &SubsystemWitness,
) -> Result<AttractingEnvironment> {
    let members: StateSet = members_of(prob, attractor).iter().map(|t| t.0).collect();
    let system = prob.env.restrict(&members, "E*").map_err(|e| {
        Error::Internal(format!("environment restricted to the attractor: {e}"))
    })?;
    Ok(AttractingEnvironment {
        system,
        members: members.into_iter().collect(),
    })
}

/// Verdict on the isomorphism between the attractor and `E*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvIso {
    /// `π_E` restricted to the attractor is injective.
    pub bijective: bool,
    /// Pairs of attractor states (full-system indices) over one environment
    /// state.
    pub collisions: Vec<(usize, usize)>,
    /// The section `E* → S*` commutes with both dynamics, and so does `π_E`.
    pub commutes: bool,
    /// `E* → S*` as a map of autonomous systems, when bijective.
    pub section: Option<SystemMap>,
}

impl EnvIso {
    pub fn holds(&self) -> bool {
        self.bijective && self.commutes
    }
}

pub fn check_env_iso(
    prob: &RegulationProblem,
    attractor: &SubsystemWitness,
    env_star: &AttractingEnvironment,
) -> Result<EnvIso> {
    let s_star = attractor.system("S*")?;
    let members = attractor.members();
    let mut over: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &s in &members {
        over.entry(prob.split(s).0).or_default().push(s);
    }
    let collisions: Vec<(usize, usize)> = over
        .values()
        .filter(|v| v.len() > 1)
        .flat_map(|v| v[1..].iter().map(move |&s| (v[0], s)))
        .collect();
    let e_pos = |e: usize| env_star.members.binary_search(&e).expect("env on attractor");
    let projection_table: Vec<usize> = members.iter().map(|&s| e_pos(prob.split(s).0)).collect();
    let projection = SystemMap::with_default_inputs(
        s_star.clone(),
        env_star.system.clone(),
        TotalFn::new(s_star.states().clone(), env_star.system.states().clone(), projection_table)?,
    )?;
    if !collisions.is_empty() || over.len() != env_star.members.len() {
        return Ok(EnvIso {
            bijective: false,
            collisions,
            commutes: projection.check().commutes,
            section: None,
        });
    }
    let section_table: Vec<usize> = env_star
        .members
        .iter()
        .map(|e| {
            let s = over[e][0];
            members.binary_search(&s).expect("attractor member")
        })
        .collect();
    let section = SystemMap::with_default_inputs(
        env_star.system.clone(),
        s_star.clone(),
        TotalFn::new(env_star.system.states().clone(), s_star.states().clone(), section_table)?,
    )?;
    let commutes = section.check().commutes && projection.check().commutes;
    Ok(EnvIso {
        bijective: true,
        collisions,
        commutes,
        section: Some(section),
    })
}

/// The projection `π_{C*} : S* → C*` with input map `(s, *) ↦ p(s)`.
pub fn controller_projection(
    prob: &RegulationProblem,
    attractor: &SubsystemWitness,
    ac: &AttractingController,
) -> Result<SystemMap> {
    let s_star = attractor.system("S*")?;
    let c_star = ac.system()?;
    let triples = members_of(prob, attractor);
    let states = triples.iter().map(|t| ac.position(t.2).expect("on C*")).collect();
    let inputs = triples
        .iter()
        .map(|t| ac.input_members.binary_search(&t.1).expect("on P*"))
        .collect();
    let chart_dom = FinSet::pair(s_star.states(), s_star.inputs())?;
    SystemMap::new(
        s_star.clone(),
        c_star.clone(),
        TotalFn::new(s_star.states().clone(), c_star.states().clone(), states)?,
        TotalFn::new(chart_dom, c_star.inputs().clone(), inputs)?,
    )
}

/// `(id, !) : C* → C*aut`.
pub fn autonomisation_map(ac: &AttractingController, c_aut: &System) -> Result<SystemMap> {
    let c_star = ac.system()?;
    SystemMap::with_default_inputs(
        c_star.clone(),
        c_aut.clone(),
        TotalFn::identity(c_star.states()).retyped(c_star.states(), c_aut.states())?,
    )
}

/// `π_{C*aut} : S* → C*aut`, `(e, p, c) ↦ c`. Fails with `NotAModel` when
/// the model conditions do not hold.
pub fn imp_full_model(
    prob: &RegulationProblem,
    attractor: &SubsystemWitness,
    c_aut: &System,
) -> Result<(SystemMap, ModelReport)> {
    let s_star = attractor.system("S*")?;
    let table = attractor
        .members()
        .into_iter()
        .map(|s| {
            let c = prob.controller.states().name(prob.split(s).2);
            c_aut.states().lookup(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let map = SystemMap::with_default_inputs(
        s_star.clone(),
        c_aut.clone(),
        TotalFn::new(s_star.states().clone(), c_aut.states().clone(), table)?,
    )?;
    let report = map.model_report();
    if !report.is_model() {
        return Err(Error::NotAModel(format!(
            "projection onto the autonomous controller: {}",
            describe_model_failure(&map, &report)
        )));
    }
    Ok((map, report))
}

/// `ν = iso⁻¹ ⨟ π_{C*aut} : E* → C*aut`.
pub fn imp_env_model(iso: &EnvIso, full_model: &SystemMap) -> Result<(SystemMap, ModelReport)> {
    let section = iso
        .section
        .as_ref()
        .filter(|_| iso.holds())
        .ok_or_else(|| Error::Precondition("no isomorphism between S* and E*".into()))?;
    let nu = section.then(full_model)?;
    let report = nu.model_report();
    if !report.is_model() {
        return Err(Error::NotAModel(format!(
            "environment model: {}",
            describe_model_failure(&nu, &report)
        )));
    }
    Ok((nu, report))
}

fn describe_model_failure(map: &SystemMap, report: &ModelReport) -> String {
    let src = map.source().states();
    let tgt = map.target().states();
    if let Some(&m) = report.unhit_states.first() {
        format!("state {} is not hit", tgt.name(m))
    } else if let Some(&(x, _)) = report.counterexamples.first() {
        format!("square fails at {}", src.name(x))
    } else if let Some(&(x, j)) = report.input_gaps.first() {
        format!("input {} not reached from {}", map.target().inputs().name(j), src.name(x))
    } else {
        "unknown failure".into()
    }
}

/// Verdict of one assumption or theorem in the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Skipped => "skipped",
        })
    }
}

impl Status {
    fn of(ok: bool) -> Status {
        if ok {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

/// Per-hypothesis verdicts. Interface checks happen when the problem is
/// built, so the first assumption holds for every constructed problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AssumptionStatus {
    /// Environment, plant and controller compose into an autonomous system.
    pub composition: Status,
    /// A nonempty attracting subsystem exists inside the lifted targets.
    pub regulation: Status,
    /// The restricted controller is closed on `C*` and ignores `P*`.
    pub autonomous_controller: Status,
    /// The attractor is isomorphic to `E*`.
    pub environment_iso: Status,
}

/// Everything the pipeline computed, stage by stage.
#[derive(Clone, Debug)]
pub struct ImpPipelineReport {
    pub full_system: System,
    pub lifted_targets: StateSet,
    pub attractor: AttractorOutcome,
    pub controller: Option<AttractingController>,
    pub autonomy: Option<Autonomy>,
    pub environment: Option<AttractingEnvironment>,
    pub env_iso: Option<EnvIso>,
    /// `π_{C*} ⨟ (id, !) = π_{C*aut}`, when both sides exist.
    pub autonomisation_commutes: Option<bool>,
    pub model_full: Option<(SystemMap, ModelReport)>,
    pub model_env: Option<(SystemMap, ModelReport)>,
    pub assumptions: AssumptionStatus,
    /// `π_{C*aut}` is a model of the attractor.
    pub theorem_full: Status,
    /// `ν` is a model of `E*`.
    pub theorem_env: Status,
}

impl ImpPipelineReport {
    pub fn attractor_witness(&self) -> Option<&SubsystemWitness> {
        self.attractor.found().map(|(w, _)| w)
    }

    pub fn horizon(&self) -> Option<usize> {
        self.attractor.found().map(|(_, n)| n)
    }

    pub fn autonomous_controller(&self) -> Option<&System> {
        match &self.autonomy {
            Some(Autonomy::Autonomous(s)) => Some(s),
            _ => None,
        }
    }

    /// True when every assumption and both theorems hold.
    pub fn all_hold(&self) -> bool {
        let a = self.assumptions;
        [
            a.composition,
            a.regulation,
            a.autonomous_controller,
            a.environment_iso,
            self.theorem_full,
            self.theorem_env,
        ]
        .iter()
        .all(|s| *s == Status::Holds)
            && self.autonomisation_commutes != Some(false)
    }
}

/// Runs every stage, recording which assumptions hold and emitting the
/// model maps whose hypotheses are met.
pub fn run_pipeline(prob: &RegulationProblem) -> Result<ImpPipelineReport> {
    let full_system = assemble_full_system(prob)?;
    let lifted_targets = lift_targets(prob);
    let attractor = match prob.attractor() {
        Some(given) => validate_attractor(&full_system, &lifted_targets, given)?,
        None => find_regulated_attractor(&full_system, &lifted_targets)?,
    };
    let mut report = ImpPipelineReport {
        full_system,
        lifted_targets,
        attractor,
        controller: None,
        autonomy: None,
        environment: None,
        env_iso: None,
        autonomisation_commutes: None,
        model_full: None,
        model_env: None,
        assumptions: AssumptionStatus {
            composition: Status::Holds,
            regulation: Status::Fails,
            autonomous_controller: Status::Skipped,
            environment_iso: Status::Skipped,
        },
        theorem_full: Status::Skipped,
        theorem_env: Status::Skipped,
    };
    let Some((witness, _)) = report.attractor.found() else {
        return Ok(report);
    };
    let witness = witness.clone();
    report.assumptions.regulation = Status::Holds;

    let ac = attracting_controller(prob, &witness)?;
    let env_star = attracting_environment(prob, &witness)?;
    let iso = check_env_iso(prob, &witness, &env_star)?;
    report.assumptions.environment_iso = Status::of(iso.holds());
    report.environment = Some(env_star);
    report.env_iso = Some(iso);

    if !ac.closure_defect.is_empty() {
        report.assumptions.autonomous_controller = Status::Fails;
        report.controller = Some(ac);
        return Ok(report);
    }
    let autonomy = autonomize_controller(&ac)?;
    report.assumptions.autonomous_controller =
        Status::of(matches!(autonomy, Autonomy::Autonomous(_)));
    if let Autonomy::Autonomous(c_aut) = &autonomy {
        let (pi, model_report) = imp_full_model(prob, &witness, c_aut)?;
        let composite = controller_projection(prob, &witness, &ac)?
            .then(&autonomisation_map(&ac, c_aut)?)?;
        report.autonomisation_commutes = Some(
            composite.on_states() == pi.on_states() && composite.on_inputs() == pi.on_inputs(),
        );
        report.theorem_full = Status::Holds;
        if let Some(iso) = report.env_iso.as_ref().filter(|i| i.holds()) {
            report.model_env = Some(imp_env_model(iso, &pi)?);
            report.theorem_env = Status::Holds;
        }
        report.model_full = Some((pi, model_report));
    }
    report.controller = Some(ac);
    report.autonomy = Some(autonomy);
    Ok(report)
}

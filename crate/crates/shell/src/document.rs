//! Resolved documents: every declaration checked by its validator and
//! every reference bound.

use std::collections::BTreeMap;

use imp_core::finsys::{split_pair, FinSet, System, SystemMap, TotalFn};
use imp_core::impkit::RegulationProblem;
use imp_core::interp::Reasoner;
use imp_core::kernelcat::{ExprEnv, Kernel, RelKernel, SetExpr, StochKernel};

use crate::ast::{Decl, DeclBody, DeclKind, Ref, SetRef};
use crate::error::{ErrorKind, ParseError, Pos};
use crate::parser::parse_decls;

/// A parsed document. Equality compares declarations only.
#[derive(Clone, Debug, Default)]
pub struct SpecDocument {
    pub decls: Vec<Decl>,
    pub sets: BTreeMap<String, FinSet>,
    pub functions: BTreeMap<String, TotalFn>,
    pub systems: BTreeMap<String, System>,
    pub maps: BTreeMap<String, SystemMap>,
    pub kernels: BTreeMap<String, Kernel>,
    pub problems: BTreeMap<String, RegulationProblem>,
    pub reasoners: BTreeMap<String, Reasoner>,
}

impl PartialEq for SpecDocument {
    fn eq(&self, other: &SpecDocument) -> bool {
        self.decls == other.decls
    }
}

/// Parses and validates a document.
pub fn parse_spec(text: &str) -> Result<SpecDocument, ParseError> {
    SpecDocument::from_decls(parse_decls(text)?)
}

fn reference(pos: Pos, message: String) -> ParseError {
    ParseError::new(ErrorKind::Reference, pos, message)
}

impl SpecDocument {
    /// Resolves declarations in order; each may refer only to earlier ones.
    pub fn from_decls(decls: Vec<Decl>) -> Result<SpecDocument, ParseError> {
        let mut doc = SpecDocument::default();
        for decl in &decls {
            doc.add(decl)?;
        }
        doc.decls = decls;
        Ok(doc)
    }

    fn contains(&self, kind: DeclKind, name: &str) -> bool {
        match kind {
            DeclKind::Set => self.sets.contains_key(name),
            DeclKind::Fn => self.functions.contains_key(name),
            DeclKind::System => self.systems.contains_key(name),
            DeclKind::Map => self.maps.contains_key(name),
            DeclKind::Kernel => self.kernels.contains_key(name),
            DeclKind::Problem => self.problems.contains_key(name),
            DeclKind::Reasoner => self.reasoners.contains_key(name),
        }
    }

    fn add(&mut self, decl: &Decl) -> Result<(), ParseError> {
        let kind = decl.kind();
        let pos = decl.pos;
        if self.contains(kind, &decl.name) {
            return Err(ParseError::new(
                ErrorKind::Validation,
                pos,
                format!("duplicate {} `{}`", kind.noun(), decl.name),
            ));
        }
        let invalid = |err: imp_core::Error| {
            ParseError::new(
                ErrorKind::Validation,
                pos,
                format!("in {} `{}`: {err}", kind.noun(), decl.name),
            )
        };
        let name = decl.name.clone();
        let label = |role: &str| format!("{name}.{role}");
        match &decl.body {
            DeclBody::Set(s) => {
                let set = self.set_ref(s, &name, pos)?;
                self.sets.insert(name, set);
            }
            DeclBody::Fn { dom, cod, table } => {
                let dom = self.set_ref(dom, &label("dom"), pos)?;
                let cod = self.set_ref(cod, &label("cod"), pos)?;
                let f = TotalFn::from_pairs(&format!("function {name}"), &dom, &cod, table).map_err(invalid)?;
                self.functions.insert(name, f);
            }
            DeclBody::System { states, inputs, update } => {
                let states = self.set_ref(states, &label("states"), pos)?;
                let inputs = self.set_ref(inputs, &label("inputs"), pos)?;
                let dom = FinSet::pair(&states, &inputs).map_err(invalid)?;
                let f = TotalFn::from_pairs(&format!("update of {name}"), &dom, &states, update)
                    .map_err(invalid)?;
                let sys = System::new(states, inputs, f).map_err(invalid)?;
                self.systems.insert(name, sys);
            }
            DeclBody::Map {
                source,
                target,
                states,
                inputs,
            } => {
                let src = self.system(source)?.clone();
                let tgt = self.system(target)?.clone();
                let on_states = TotalFn::from_pairs(&format!("map {name} on states"), src.states(), tgt.states(), states)
                    .map_err(invalid)?;
                let map = match inputs {
                    Some(table) => {
                        let chart = FinSet::pair(src.states(), src.inputs()).map_err(invalid)?;
                        let on_inputs =
                            TotalFn::from_pairs(&format!("map {name} on inputs"), &chart, tgt.inputs(), table)
                                .map_err(invalid)?;
                        SystemMap::new(src, tgt, on_states, on_inputs)
                    }
                    None => SystemMap::with_default_inputs(src, tgt, on_states),
                }
                .map_err(invalid)?;
                self.maps.insert(name, map);
            }
            DeclBody::RelKernel { dom, cod, rows } => {
                let dom = self.set_ref(dom, &label("dom"), pos)?;
                let cod = self.set_ref(cod, &label("cod"), pos)?;
                let k = RelKernel::from_named(&dom, &cod, rows).map_err(invalid)?;
                self.kernels.insert(name, Kernel::Rel(k));
            }
            DeclBody::StochKernel { dom, cod, rows } => {
                let dom = self.set_ref(dom, &label("dom"), pos)?;
                let cod = self.set_ref(cod, &label("cod"), pos)?;
                let k = StochKernel::from_named(&dom, &cod, rows).map_err(invalid)?;
                self.kernels.insert(name, Kernel::Stoch(k));
            }
            DeclBody::Problem {
                env,
                plant,
                controller,
                targets,
                attractor,
            } => {
                let env = self.system(env)?.clone();
                let plant = self.system(plant)?.clone();
                let controller = self.system(controller)?.clone();
                let ep = FinSet::pair(env.states(), plant.states()).map_err(invalid)?;
                let np = plant.states().len();
                let targets = targets
                    .iter()
                    .map(|t| ep.lookup(t).map(|k| split_pair(k, np)))
                    .collect::<imp_core::Result<_>>()
                    .map_err(invalid)?;
                let mut prob = RegulationProblem::new(env, plant, controller, targets).map_err(invalid)?;
                if let Some(names) = attractor {
                    let full = prob.full_states().map_err(invalid)?;
                    let subset = names
                        .iter()
                        .map(|n| full.lookup(n))
                        .collect::<imp_core::Result<_>>()
                        .map_err(invalid)?;
                    prob = prob.with_attractor(subset).map_err(invalid)?;
                }
                self.problems.insert(name, prob);
            }
            DeclBody::Reasoner {
                params,
                observations,
                hidden,
                update,
                interpretation,
                model,
            } => {
                let params = self.set_ref(params, &label("params"), pos)?;
                let observations = self.set_ref(observations, &label("observations"), pos)?;
                let hidden = self.set_ref(hidden, &label("hidden"), pos)?;
                let c = self
                    .functions
                    .get(&update.name)
                    .cloned()
                    .ok_or_else(|| reference(update.pos, format!("unknown function `{}`", update.name)))?;
                let psi = self.relation(interpretation, &name)?;
                let kappa = self.relation(model, &name)?;
                let r = Reasoner::new(params, observations, hidden, c, psi, kappa).map_err(invalid)?;
                self.reasoners.insert(name, r);
            }
        }
        Ok(())
    }

    fn system(&self, r: &Ref) -> Result<&System, ParseError> {
        self.systems
            .get(&r.name)
            .ok_or_else(|| reference(r.pos, format!("unknown system `{}`", r.name)))
    }

    fn relation(&self, r: &Ref, owner: &str) -> Result<RelKernel, ParseError> {
        match self.kernels.get(&r.name) {
            Some(Kernel::Rel(k)) => Ok(k.clone()),
            Some(Kernel::Stoch(_)) => Err(ParseError::new(
                ErrorKind::Validation,
                r.pos,
                format!("in reasoner `{owner}`: kernel `{}` must be a relation", r.name),
            )),
            None => Err(reference(r.pos, format!("unknown kernel `{}`", r.name))),
        }
    }

    fn set_expr(&self, e: &SetExpr, pos: Pos) -> Result<FinSet, ParseError> {
        match e {
            SetExpr::Named(n) => self
                .sets
                .get(n)
                .cloned()
                .ok_or_else(|| reference(pos, format!("unknown set `{n}`"))),
            SetExpr::Unit => Ok(FinSet::unit()),
            SetExpr::Product(parts) => {
                let parts = parts
                    .iter()
                    .map(|p| self.set_expr(p, pos))
                    .collect::<Result<Vec<_>, _>>()?;
                FinSet::product(&parts)
                    .map_err(|err| ParseError::new(ErrorKind::Validation, pos, err.to_string()))
            }
        }
    }

    fn set_ref(&self, s: &SetRef, label: &str, pos: Pos) -> Result<FinSet, ParseError> {
        match s {
            SetRef::Literal(elements) => FinSet::new(label, elements.clone())
                .map_err(|err| ParseError::new(ErrorKind::Validation, pos, format!("in set `{label}`: {err}"))),
            SetRef::Expr(e) => self.set_expr(e, pos),
        }
    }

    /// Names visible to kernel expressions. Functions include declared
    /// functions, each map's state part and each system's update; sets
    /// include each system's states. Declared names win on a clash.
    pub fn expr_env(&self) -> ExprEnv {
        let mut env = ExprEnv {
            sets: self.sets.clone(),
            functions: self.functions.clone(),
            kernels: self.kernels.clone(),
        };
        for (name, map) in &self.maps {
            env.functions.entry(name.clone()).or_insert_with(|| map.on_states().clone());
        }
        for (name, sys) in &self.systems {
            env.functions.entry(name.clone()).or_insert_with(|| sys.update().clone());
            env.sets.entry(name.clone()).or_insert_with(|| sys.states().clone());
        }
        env
    }
}

//! Seeded random models and conversion of core objects to declarations.

use imp_core::finsys::{FinSet, System, SystemMap, TotalFn};
use imp_core::interp::Reasoner;
use imp_core::kernelcat::{Markov, RelKernel, SetExpr};
use imp_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ast::{Decl, DeclBody, Ref, SetRef, Table};

/// Parameters of one generated model. Inputs are always the unit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub model_states: usize,
    pub max_fibre: usize,
}

impl GenConfig {
    pub fn new(seed: u64, model_states: usize, max_fibre: usize) -> Result<GenConfig> {
        if model_states == 0 || max_fibre == 0 {
            return Err(Error::Precondition(
                "model states and maximum fibre size must be at least 1".into(),
            ));
        }
        Ok(GenConfig {
            seed,
            model_states,
            max_fibre,
        })
    }

    /// The configuration used by suites: `1 + seed % 4` model states.
    pub fn for_suite(seed: u64, max_fibre: usize) -> Result<GenConfig> {
        GenConfig::new(seed, 1 + (seed % 4) as usize, max_fibre)
    }
}

/// A generated model `μ : X → M` of autonomous systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedModel {
    pub config: GenConfig,
    pub mu: SystemMap,
}

/// Draws `upd_M`, fibre sizes in `1..=max_fibre`, and `upd_X(x)` uniformly
/// inside `fibre(upd_M(μ(x)))`, then re-checks the model conditions.
pub fn generate_model(cfg: GenConfig) -> Result<GeneratedModel> {
    let m = cfg.model_states;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let upd_m: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
    let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=cfg.max_fibre)).collect();
    let mut owner = Vec::new();
    let mut fibres: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (k, &n) in sizes.iter().enumerate() {
        for _ in 0..n {
            fibres[k].push(owner.len());
            owner.push(k);
        }
    }
    let upd_x: Vec<usize> = owner
        .iter()
        .map(|&k| {
            let target = &fibres[upd_m[k]];
            target[rng.gen_range(0..target.len())]
        })
        .collect();
    let xs = FinSet::numbered("X", "x", owner.len())?;
    let ms = FinSet::numbered("M", "m", m)?;
    let x = System::autonomous(&xs, |i| upd_x[i])?;
    let msys = System::autonomous(&ms, |i| upd_m[i])?;
    let mu = SystemMap::with_default_inputs(x, msys, TotalFn::new(xs, ms, owner)?)?;
    if !mu.model_report().is_model() {
        return Err(Error::Internal(format!("generated map for seed {} is not a model", cfg.seed)));
    }
    Ok(GeneratedModel { config: cfg, mu })
}

pub fn literal(set: &FinSet) -> SetRef {
    if set.is_unit() {
        SetRef::Expr(SetExpr::Unit)
    } else {
        SetRef::Literal(set.names().to_vec())
    }
}

pub fn table(f: &TotalFn) -> Table {
    f.pairs().into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn named(n: &str) -> SetRef {
    SetRef::Expr(SetExpr::Named(n.into()))
}

/// A set declaration and a system over it.
fn system_decls(set_name: &str, sys_name: &str, sys: &System) -> Vec<Decl> {
    vec![
        Decl::new(set_name, DeclBody::Set(literal(sys.states()))),
        Decl::new(
            sys_name,
            DeclBody::System {
                states: named(set_name),
                inputs: literal(sys.inputs()),
                update: table(sys.update()),
            },
        ),
    ]
}

/// Declarations for the two systems and the map `mu`.
pub fn model_decls(source_name: &str, target_name: &str, mu: &SystemMap) -> Vec<Decl> {
    let mut decls = system_decls("X", source_name, mu.source());
    decls.extend(system_decls("M", target_name, mu.target()));
    let inputs = if mu.target().is_autonomous() {
        None
    } else {
        Some(table(mu.on_inputs()))
    };
    decls.push(Decl::new(
        "mu",
        DeclBody::Map {
            source: Ref::new(source_name),
            target: Ref::new(target_name),
            states: table(mu.on_states()),
            inputs,
        },
    ));
    decls
}

impl GeneratedModel {
    pub fn decls(&self) -> Vec<Decl> {
        model_decls("X", "M", &self.mu)
    }
}

fn rel_rows(k: &RelKernel) -> Vec<(String, Vec<String>)> {
    k.dom()
        .indices()
        .map(|x| {
            let ys = k.image_names(x).into_iter().map(String::from).collect();
            (k.dom().name(x).to_string(), ys)
        })
        .collect()
}

/// Declarations `T`, `Y`, `X`, `c`, `psi`, `kappa` and the reasoner itself.
pub fn reasoner_decls(name: &str, r: &Reasoner) -> Vec<Decl> {
    let pair = |a: &str, b: &str| SetRef::Expr(SetExpr::Product(vec![SetExpr::Named(a.into()), SetExpr::Named(b.into())]));
    vec![
        Decl::new("T", DeclBody::Set(literal(r.params()))),
        Decl::new("Y", DeclBody::Set(literal(r.observations()))),
        Decl::new("X", DeclBody::Set(literal(r.hidden()))),
        Decl::new(
            "c",
            DeclBody::Fn {
                dom: pair("Y", "T"),
                cod: named("T"),
                table: table(r.update()),
            },
        ),
        Decl::new(
            "psi",
            DeclBody::RelKernel {
                dom: named("T"),
                cod: named("X"),
                rows: rel_rows(r.interpretation()),
            },
        ),
        Decl::new(
            "kappa",
            DeclBody::RelKernel {
                dom: named("X"),
                cod: pair("X", "Y"),
                rows: rel_rows(r.model()),
            },
        ),
        Decl::new(
            name,
            DeclBody::Reasoner {
                params: named("T"),
                observations: named("Y"),
                hidden: named("X"),
                update: Ref::new("c"),
                interpretation: Ref::new("psi"),
                model: Ref::new("kappa"),
            },
        ),
    ]
}

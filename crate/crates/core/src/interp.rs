//! Fibres, closures and the possibilistic filtering interpretation of a
//! model between autonomous systems.
//!
//! A model `μ : X → M` induces a reasoner with parameters `M`, hidden states
//! and observations both `X`, interpretation `ψ = μ⁻¹`, parameter update
//! `c(y, m) = upd_M(m)` and hidden Markov model `κ(x) = ◇upd(x) × {x}`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::finsys::{pair_index, FinSet, System, SystemMap, TotalFn};
use crate::impkit::ImpPipelineReport;
use crate::kernelcat::{
    check_filtering_conjugate, check_positivity_instance, compare, EquationCheck, Markov,
    Positivity, RelKernel,
};

/// `b ↦ f⁻¹(b)`. Fails when `f` misses an element.
pub fn preimage_kernel(f: &TotalFn) -> Result<RelKernel> {
    RelKernel::preimage(f)
}

/// `◇_f(a) = {a' : f(a') = f(a)}`, built from the set formula.
pub fn closure_kernel(f: &TotalFn) -> Result<RelKernel> {
    if let Some(&b) = f.unhit().first() {
        return Err(Error::NotSurjective(
            format!("{} -> {}", f.dom().label(), f.cod().label()),
            f.cod().name(b).to_string(),
        ));
    }
    let image = f
        .dom()
        .indices()
        .map(|a| {
            f.dom()
                .indices()
                .filter(|&a2| f.apply(a2) == f.apply(a))
                .collect()
        })
        .collect();
    RelKernel::new(f.dom().clone(), f.dom().clone(), image)
}

fn require_autonomous(sys: &System, role: &str) -> Result<()> {
    if sys.is_autonomous() {
        Ok(())
    } else {
        Err(Error::NotAutonomous(format!(
            "{role} has inputs {}",
            sys.inputs().describe()
        )))
    }
}

/// The update seen through `μ_s`: `upd ⨟ ◇_{μ_s}`.
pub fn diamond_update(sys: &System, mu_s: &TotalFn) -> Result<RelKernel> {
    require_autonomous(sys, "system")?;
    if mu_s.dom() != sys.states() {
        return Err(Error::TypeMismatch {
            context: "state map of the closure".into(),
            expected: sys.states().describe(),
            found: mu_s.dom().describe(),
        });
    }
    RelKernel::from_fn(sys.update()).then(&closure_kernel(mu_s)?)
}

fn require_model(mu: &SystemMap) -> Result<()> {
    require_autonomous(mu.source(), "source")?;
    require_autonomous(mu.target(), "target")?;
    let report = mu.model_report();
    if !report.is_model() {
        let src = mu.source().states();
        let reason = if let Some(&m) = report.unhit_states.first() {
            format!("state {} has an empty fibre", mu.target().states().name(m))
        } else if let Some(&(x, _)) = report.counterexamples.first() {
            format!("square fails at {}", src.name(x))
        } else {
            "inputs not fibrewise surjective".into()
        };
        return Err(Error::NotAModel(reason));
    }
    Ok(())
}

/// Checks `μ⁻¹ ⨟ ◇upd_X = upd_M ⨟ μ⁻¹` over `M`.
pub fn check_indexed_model(mu: &SystemMap) -> Result<EquationCheck> {
    require_model(mu)?;
    let (lhs, rhs) = indexed_model_sides(mu)?;
    compare("indexed model", &lhs, &rhs)
}

/// Both sides of the indexed-model square, without the model precondition.
pub fn indexed_model_sides(mu: &SystemMap) -> Result<(RelKernel, RelKernel)> {
    let pre = preimage_kernel(mu.on_states())?;
    let lhs = pre.then(&diamond_update(mu.source(), mu.on_states())?)?;
    let rhs = RelKernel::from_fn(mu.target().update()).then(&pre)?;
    Ok((lhs, rhs))
}

/// A parameter update, interpretation and hidden Markov model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reasoner {
    params: FinSet,
    observations: FinSet,
    hidden: FinSet,
    update: TotalFn,
    interpretation: RelKernel,
    model: RelKernel,
}

impl Reasoner {
    /// Checks the types `c : Y × Θ → Θ`, `ψ : Θ → X`, `κ : X → X × Y`.
    /// Consistency is not required here; see [`check_interpretation`].
    pub fn new(
        params: FinSet,
        observations: FinSet,
        hidden: FinSet,
        update: TotalFn,
        interpretation: RelKernel,
        model: RelKernel,
    ) -> Result<Reasoner> {
        let expect = |context: &str, expected: FinSet, found: &FinSet| {
            if expected == *found {
                Ok(())
            } else {
                Err(Error::TypeMismatch {
                    context: context.into(),
                    expected: expected.describe(),
                    found: found.describe(),
                })
            }
        };
        expect("update domain", FinSet::pair(&observations, &params)?, update.dom())?;
        expect("update codomain", params.clone(), update.cod())?;
        expect("interpretation domain", params.clone(), interpretation.dom())?;
        expect("interpretation codomain", hidden.clone(), interpretation.cod())?;
        expect("model domain", hidden.clone(), model.dom())?;
        expect("model codomain", FinSet::pair(&hidden, &observations)?, model.cod())?;
        Ok(Reasoner {
            params,
            observations,
            hidden,
            update,
            interpretation,
            model,
        })
    }

    pub fn params(&self) -> &FinSet {
        &self.params
    }

    pub fn observations(&self) -> &FinSet {
        &self.observations
    }

    pub fn hidden(&self) -> &FinSet {
        &self.hidden
    }

    pub fn update(&self) -> &TotalFn {
        &self.update
    }

    pub fn interpretation(&self) -> &RelKernel {
        &self.interpretation
    }

    pub fn model(&self) -> &RelKernel {
        &self.model
    }

    /// `c(y, θ)` by index.
    pub fn next_param(&self, y: usize, theta: usize) -> usize {
        self.update
            .apply(pair_index(y, theta, self.params.len()))
    }
}

/// The reasoner induced by a model between autonomous systems.
pub fn derive_interpretation(mu: &SystemMap) -> Result<Reasoner> {
    require_model(mu)?;
    let params = mu.target().states().clone();
    let hidden = mu.source().states().clone();
    let observations = hidden.relabel("Y");
    let upd_m = mu.target().update();
    let nt = params.len();
    let update = TotalFn::from_fn(&FinSet::pair(&observations, &params)?, &params, |i| {
        upd_m.apply(i % nt)
    })?;
    let interpretation = preimage_kernel(mu.on_states())?;
    let diamond = diamond_update(mu.source(), mu.on_states())?;
    let ny = observations.len();
    let image = hidden
        .indices()
        .map(|x| {
            diamond
                .image(x)
                .iter()
                .map(|&x2| pair_index(x2, x, ny))
                .collect()
        })
        .collect();
    let model = RelKernel::new(
        hidden.clone(),
        FinSet::pair(&hidden, &observations)?,
        image,
    )?;
    Reasoner::new(params, observations, hidden, update, interpretation, model)
}

/// Consistency and the two structural properties of a reasoner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretationReport {
    pub consistency: EquationCheck,
    pub beliefs_disjoint: bool,
    pub observations_ignored: bool,
    /// `(θ, θ', x)` with `x ∈ ψ(θ) ∩ ψ(θ')`.
    pub overlaps: Vec<(usize, usize, usize)>,
    /// `(θ, y, y')` with `c(y, θ) ≠ c(y', θ)`.
    pub observation_uses: Vec<(usize, usize, usize)>,
}

impl InterpretationReport {
    pub fn all_hold(&self) -> bool {
        self.consistency.holds && self.beliefs_disjoint && self.observations_ignored
    }
}

pub fn check_interpretation(r: &Reasoner) -> Result<InterpretationReport> {
    let c = RelKernel::from_fn(&r.update);
    let consistency = check_filtering_conjugate(&r.interpretation, &r.model, &c)?;
    let mut overlaps = Vec::new();
    for t1 in r.params.indices() {
        for t2 in t1 + 1..r.params.len() {
            let common: BTreeSet<usize> = r
                .interpretation
                .image(t1)
                .intersection(r.interpretation.image(t2))
                .copied()
                .collect();
            overlaps.extend(common.into_iter().map(|x| (t1, t2, x)));
        }
    }
    let mut observation_uses = Vec::new();
    for t in r.params.indices() {
        let first = r.next_param(0, t);
        observation_uses.extend(
            r.observations
                .indices()
                .skip(1)
                .filter(|&y| r.next_param(y, t) != first)
                .map(|y| (t, 0, y)),
        );
    }
    Ok(InterpretationReport {
        consistency,
        beliefs_disjoint: overlaps.is_empty(),
        observations_ignored: observation_uses.is_empty(),
        overlaps,
        observation_uses,
    })
}

/// Positivity on the pair `(ψ ⨟ ◇upd, μ_s)`, whose composite is `upd_M`.
pub fn positivity_key_step(mu: &SystemMap) -> Result<Positivity> {
    require_model(mu)?;
    let f = preimage_kernel(mu.on_states())?.then(&diamond_update(mu.source(), mu.on_states())?)?;
    check_positivity_instance(&f, &RelKernel::from_fn(mu.on_states()))
}

/// Reasoners for the attractor (from `π_{C*aut}`) and, when available, for
/// the attracting environment (from `ν`).
pub fn imp_interpretations(report: &ImpPipelineReport) -> Result<(Reasoner, Option<Reasoner>)> {
    let (full, _) = report
        .model_full
        .as_ref()
        .ok_or_else(|| Error::Precondition("the pipeline produced no full model".into()))?;
    let full = derive_interpretation(full)?;
    let env = report
        .model_env
        .as_ref()
        .map(|(nu, _)| derive_interpretation(nu))
        .transpose()?;
    Ok((full, env))
}

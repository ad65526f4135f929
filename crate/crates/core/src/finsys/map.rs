//! Maps of systems and the model conditions.
//!
//! A map `f : X → X'` has a state part `X → X'` and a chart-style input part
//! `X × I → I'`. It is a map of systems when
//! `f_s(upd(x, i)) = upd'(f_s(x), f_i(x, i))` for every `(x, i)`.

use super::func::TotalFn;
use super::set::{pair_index, FinSet};
use super::system::System;
use crate::error::{Error, Result};

/// A candidate map of systems. Construction checks typing only; the
/// commuting square is checked by [`SystemMap::check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMap {
    source: System,
    target: System,
    on_states: TotalFn,
    on_inputs: TotalFn,
}

/// Result of checking the commuting square.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapCheck {
    pub commutes: bool,
    /// Every violating `(x, i)`, in index order.
    pub counterexamples: Vec<(usize, usize)>,
}

/// Result of checking the model conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelReport {
    pub surjective_on_states: bool,
    pub fibrewise_surjective_on_inputs: bool,
    pub square_commutes: bool,
    /// Target states with empty fibre.
    pub unhit_states: Vec<usize>,
    /// `(x, j)` such that no input `i` has `f_i(x, i) = j`.
    pub input_gaps: Vec<(usize, usize)>,
    /// `(x, i)` where the square fails.
    pub counterexamples: Vec<(usize, usize)>,
}

impl ModelReport {
    pub fn is_model(&self) -> bool {
        self.surjective_on_states && self.fibrewise_surjective_on_inputs && self.square_commutes
    }
}

impl SystemMap {
    pub fn new(
        source: System,
        target: System,
        on_states: TotalFn,
        on_inputs: TotalFn,
    ) -> Result<SystemMap> {
        expect_type("map on states", source.states(), target.states(), &on_states)?;
        let chart_dom = FinSet::pair(source.states(), source.inputs())?;
        expect_type("map on inputs", &chart_dom, target.inputs(), &on_inputs)?;
        Ok(SystemMap {
            source,
            target,
            on_states,
            on_inputs,
        })
    }

    /// Builds a map whose input part is defaulted: the unique map when the
    /// target is autonomous, the projection `(x, i) ↦ i` when both systems
    /// share their inputs.
    pub fn with_default_inputs(
        source: System,
        target: System,
        on_states: TotalFn,
    ) -> Result<SystemMap> {
        let on_inputs = default_input_map(&source, &target)?;
        SystemMap::new(source, target, on_states, on_inputs)
    }

    pub fn identity(sys: &System) -> SystemMap {
        let on_inputs = default_input_map(sys, sys).expect("identity input map");
        SystemMap {
            source: sys.clone(),
            target: sys.clone(),
            on_states: TotalFn::identity(sys.states()),
            on_inputs,
        }
    }

    pub fn source(&self) -> &System {
        &self.source
    }

    pub fn target(&self) -> &System {
        &self.target
    }

    pub fn on_states(&self) -> &TotalFn {
        &self.on_states
    }

    pub fn on_inputs(&self) -> &TotalFn {
        &self.on_inputs
    }

    #[inline]
    fn input_image(&self, x: usize, i: usize) -> usize {
        self.on_inputs
            .apply(pair_index(x, i, self.source.inputs().len()))
    }

    /// Checks the commuting square exhaustively.
    pub fn check(&self) -> MapCheck {
        let mut counterexamples = Vec::new();
        for x in self.source.states().indices() {
            for i in self.source.inputs().indices() {
                let lhs = self.on_states.apply(self.source.step(x, i));
                let rhs = self
                    .target
                    .step(self.on_states.apply(x), self.input_image(x, i));
                if lhs != rhs {
                    counterexamples.push((x, i));
                }
            }
        }
        MapCheck {
            commutes: counterexamples.is_empty(),
            counterexamples,
        }
    }

    /// Diagrammatic composite `self ⨟ next`: states compose, inputs are
    /// `(x, i) ↦ next_i(f_s(x), f_i(x, i))`.
    pub fn then(&self, next: &SystemMap) -> Result<SystemMap> {
        if self.target != next.source {
            return Err(Error::TypeMismatch {
                context: "composition of system maps".into(),
                expected: format!(
                    "source with states {}",
                    next.source.states().describe()
                ),
                found: format!("target with states {}", self.target.states().describe()),
            });
        }
        let on_states = self.on_states.then(&next.on_states)?;
        let ni = self.source.inputs().len();
        let chart_dom = FinSet::pair(self.source.states(), self.source.inputs())?;
        let on_inputs = TotalFn::from_fn(&chart_dom, next.target.inputs(), |xi| {
            let (x, i) = (xi / ni, xi % ni);
            next.input_image(self.on_states.apply(x), self.input_image(x, i))
        })?;
        Ok(SystemMap {
            source: self.source.clone(),
            target: next.target.clone(),
            on_states,
            on_inputs,
        })
    }

    /// Checks the model conditions: surjective on states, fibrewise
    /// surjective on inputs, and the square commutes.
    pub fn model_report(&self) -> ModelReport {
        let unhit_states = self.on_states.unhit();
        let nj = self.target.inputs().len();
        let mut input_gaps = Vec::new();
        for x in self.source.states().indices() {
            let mut hit = vec![false; nj];
            for i in self.source.inputs().indices() {
                hit[self.input_image(x, i)] = true;
            }
            input_gaps.extend((0..nj).filter(|&j| !hit[j]).map(|j| (x, j)));
        }
        let square = self.check();
        ModelReport {
            surjective_on_states: unhit_states.is_empty(),
            fibrewise_surjective_on_inputs: input_gaps.is_empty(),
            square_commutes: square.commutes,
            unhit_states,
            input_gaps,
            counterexamples: square.counterexamples,
        }
    }

    /// Fibre of a target state under the state map.
    pub fn fibre(&self, m: usize) -> Vec<usize> {
        self.on_states.fibre(m)
    }

    /// Decides whether this model is trivial: the source factors as `M × F`
    /// on states and `J × H` on inputs with uncoupled dynamics
    /// `upd((m, f), (j, h)) = (upd_M(m, j), upd_F(f, h))`.
    ///
    /// The pairings `x ↦ (μ_s(x), factor_states(x))` and, for each `x`,
    /// `i ↦ (μ_i(x, i), factor_inputs(i))` must be bijections.
    pub fn is_trivial_model(
        &self,
        factor_states: &TotalFn,
        factor_inputs: &TotalFn,
        factor: &System,
    ) -> Result<TrivialModelCheck> {
        expect_type(
            "state factor",
            self.source.states(),
            factor.states(),
            factor_states,
        )?;
        expect_type(
            "input factor",
            self.source.inputs(),
            factor.inputs(),
            factor_inputs,
        )?;
        let nm = self.target.states().len();
        let nf = factor.states().len();
        let states_pairing = TotalFn::from_fn(
            self.source.states(),
            &FinSet::pair(self.target.states(), factor.states())?,
            |x| pair_index(self.on_states.apply(x), factor_states.apply(x), nf),
        )?;
        if !states_pairing.is_bijective() {
            return Err(Error::NotBijective(format!(
                "states do not split as {} × {} ({} vs {} elements, or a collision)",
                self.target.states().label(),
                factor.states().label(),
                self.source.states().len(),
                nm * nf
            )));
        }
        let nh = factor.inputs().len();
        let pair_inputs = FinSet::pair(self.target.inputs(), factor.inputs())?;
        for x in self.source.states().indices() {
            let pairing = TotalFn::from_fn(self.source.inputs(), &pair_inputs, |i| {
                pair_index(self.input_image(x, i), factor_inputs.apply(i), nh)
            })?;
            if !pairing.is_bijective() {
                return Err(Error::NotBijective(format!(
                    "inputs do not split as {} × {} at state `{}`",
                    self.target.inputs().label(),
                    factor.inputs().label(),
                    self.source.states().name(x)
                )));
            }
        }
        let mut failures = Vec::new();
        for x in self.source.states().indices() {
            for i in self.source.inputs().indices() {
                let next = self.source.step(x, i);
                let m_ok = self.on_states.apply(next)
                    == self
                        .target
                        .step(self.on_states.apply(x), self.input_image(x, i));
                let f_ok = factor_states.apply(next)
                    == factor.step(factor_states.apply(x), factor_inputs.apply(i));
                if !(m_ok && f_ok) {
                    failures.push((x, i));
                }
            }
        }
        Ok(TrivialModelCheck {
            trivial: failures.is_empty(),
            failures,
        })
    }
}

/// Result of [`SystemMap::is_trivial_model`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialModelCheck {
    pub trivial: bool,
    /// `(x, i)` where the componentwise decomposition fails.
    pub failures: Vec<(usize, usize)>,
}

fn expect_type(context: &str, dom: &FinSet, cod: &FinSet, f: &TotalFn) -> Result<()> {
    if f.dom() != dom || f.cod() != cod {
        return Err(Error::TypeMismatch {
            context: context.to_string(),
            expected: format!("{} -> {}", dom.describe(), cod.describe()),
            found: format!("{} -> {}", f.dom().describe(), f.cod().describe()),
        });
    }
    Ok(())
}

fn default_input_map(source: &System, target: &System) -> Result<TotalFn> {
    let chart_dom = FinSet::pair(source.states(), source.inputs())?;
    if target.is_autonomous() {
        return Ok(TotalFn::to_unit(&chart_dom));
    }
    if source.inputs() == target.inputs() {
        let ni = source.inputs().len();
        return TotalFn::from_fn(&chart_dom, target.inputs(), |xi| xi % ni);
    }
    Err(Error::Precondition(format!(
        "an explicit input map is required from inputs {} to {}",
        source.inputs().label(),
        target.inputs().label()
    )))
}

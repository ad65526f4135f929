use std::collections::BTreeSet;

use super::func::TotalFn;
use super::set::{pair_index, FinSet};
use crate::error::{Error, Result};

/// A set of states, by index.
pub type StateSet = BTreeSet<usize>;

/// A fully observable discrete-time system: states, inputs and a total update
/// `X × I → X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    states: FinSet,
    inputs: FinSet,
    update: TotalFn,
}

impl System {
    pub fn new(states: FinSet, inputs: FinSet, update: TotalFn) -> Result<System> {
        let dom = FinSet::pair(&states, &inputs)?;
        if *update.dom() != dom {
            return Err(Error::TypeMismatch {
                context: "system update domain".into(),
                expected: dom.describe(),
                found: update.dom().describe(),
            });
        }
        if *update.cod() != states {
            return Err(Error::TypeMismatch {
                context: "system update codomain".into(),
                expected: states.describe(),
                found: update.cod().describe(),
            });
        }
        Ok(System {
            states,
            inputs,
            update,
        })
    }

    /// Builds a system from an index-level update rule.
    pub fn from_rule(
        states: &FinSet,
        inputs: &FinSet,
        rule: impl Fn(usize, usize) -> usize,
    ) -> Result<System> {
        let ni = inputs.len();
        let dom = FinSet::pair(states, inputs)?;
        let update = TotalFn::from_fn(&dom, states, |xi| rule(xi / ni, xi % ni))?;
        System::new(states.clone(), inputs.clone(), update)
    }

    /// An autonomous system `X → X`.
    pub fn autonomous(states: &FinSet, next: impl Fn(usize) -> usize) -> Result<System> {
        System::from_rule(states, &FinSet::unit(), |x, _| next(x))
    }

    pub fn states(&self) -> &FinSet {
        &self.states
    }

    pub fn inputs(&self) -> &FinSet {
        &self.inputs
    }

    pub fn update(&self) -> &TotalFn {
        &self.update
    }

    pub fn is_autonomous(&self) -> bool {
        self.inputs.is_unit()
    }

    #[inline]
    pub fn step(&self, x: usize, i: usize) -> usize {
        self.update.apply(pair_index(x, i, self.inputs.len()))
    }

    /// Trajectory `start, upd(start, w0), ...` of length `word.len() + 1`.
    pub fn run(&self, start: usize, word: &[usize]) -> Vec<usize> {
        let mut traj = Vec::with_capacity(word.len() + 1);
        traj.push(start);
        let mut x = start;
        for &i in word {
            x = self.step(x, i);
            traj.push(x);
        }
        traj
    }

    /// [`System::run`] with states and inputs given by name.
    pub fn run_named(&self, start: &str, word: &[&str]) -> Result<Vec<String>> {
        let x = self.states.lookup(start)?;
        let word = word
            .iter()
            .map(|i| self.inputs.lookup(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(self
            .run(x, &word)
            .into_iter()
            .map(|s| self.states.name(s).to_string())
            .collect())
    }

    /// Resolves state names to a [`StateSet`].
    pub fn state_set<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet> {
        names.iter().map(|n| self.states.lookup(n.as_ref())).collect()
    }

    /// First `(state, input)` in order whose successor leaves `subset`.
    pub fn find_escape(&self, subset: &StateSet) -> Option<(usize, usize)> {
        subset.iter().find_map(|&x| {
            self.inputs
                .indices()
                .find(|&i| !subset.contains(&self.step(x, i)))
                .map(|i| (x, i))
        })
    }

    pub fn is_forward_invariant(&self, subset: &StateSet) -> bool {
        self.find_escape(subset).is_none()
    }

    fn check_subset(&self, subset: &StateSet) -> Result<()> {
        match subset.iter().find(|&&x| x >= self.states.len()) {
            Some(&x) => Err(Error::UnknownElement {
                set: self.states.label().to_string(),
                element: format!("#{x}"),
            }),
            None => Ok(()),
        }
    }

    /// Decides whether `subset` is an attracting subsystem by the backward
    /// fixpoint `G₀ = subset`, `G_{k+1} = G_k ∪ {x : ∀i, upd(x, i) ∈ G_k}`.
    pub fn attraction(&self, subset: &StateSet) -> Result<AttractionReport> {
        self.check_subset(subset)?;
        if subset.is_empty() {
            return Err(Error::EmptyAttractor);
        }
        if let Some((x, i)) = self.find_escape(subset) {
            return Err(Error::NotForwardInvariant {
                state: self.states.name(x).to_string(),
                input: self.inputs.name(i).to_string(),
            });
        }
        let n = self.states.len();
        let mut inside = vec![false; n];
        for &x in subset {
            inside[x] = true;
        }
        let mut count = subset.len();
        let mut k = 0;
        while count < n {
            let added: Vec<usize> = (0..n)
                .filter(|&x| !inside[x])
                .filter(|&x| self.inputs.indices().all(|i| inside[self.step(x, i)]))
                .collect();
            if added.is_empty() {
                break;
            }
            for x in added {
                inside[x] = true;
                count += 1;
            }
            k += 1;
        }
        let stranded: Vec<usize> = (0..n).filter(|&x| !inside[x]).collect();
        Ok(AttractionReport {
            attracting: stranded.is_empty(),
            horizon: stranded.is_empty().then_some(k),
            stranded,
        })
    }

    /// The largest forward-invariant subset of `within` (greatest fixpoint).
    pub fn largest_invariant_subset(&self, within: &StateSet) -> StateSet {
        let mut current = within.clone();
        loop {
            let next: StateSet = current
                .iter()
                .copied()
                .filter(|&x| {
                    self.inputs
                        .indices()
                        .all(|i| current.contains(&self.step(x, i)))
                })
                .collect();
            if next.len() == current.len() {
                return current;
            }
            current = next;
        }
    }

    /// The system obtained by restricting to a forward-invariant subset.
    pub fn restrict(&self, subset: &StateSet, label: &str) -> Result<System> {
        self.check_subset(subset)?;
        if let Some((x, i)) = self.find_escape(subset) {
            return Err(Error::NotForwardInvariant {
                state: self.states.name(x).to_string(),
                input: self.inputs.name(i).to_string(),
            });
        }
        let members: Vec<usize> = subset.iter().copied().collect();
        let states = self.states.subset(label, &members)?;
        let pos = |x: usize| members.binary_search(&x).expect("invariant subset");
        System::from_rule(&states, &self.inputs, |s, i| pos(self.step(members[s], i)))
    }
}

/// Outcome of [`System::attraction`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractionReport {
    pub attracting: bool,
    /// Least `k` with `G_k` equal to all states, when attracting.
    pub horizon: Option<usize>,
    /// States from which the subset is not guaranteed to be reached.
    pub stranded: Vec<usize>,
}

/// A forward-invariant subset of a parent system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemWitness {
    parent: System,
    subset: StateSet,
}

impl SubsystemWitness {
    pub fn new(parent: System, subset: StateSet) -> Result<SubsystemWitness> {
        parent.check_subset(&subset)?;
        if let Some((x, i)) = parent.find_escape(&subset) {
            return Err(Error::NotForwardInvariant {
                state: parent.states.name(x).to_string(),
                input: parent.inputs.name(i).to_string(),
            });
        }
        Ok(SubsystemWitness { parent, subset })
    }

    pub fn parent(&self) -> &System {
        &self.parent
    }

    pub fn subset(&self) -> &StateSet {
        &self.subset
    }

    /// Subset members in increasing parent index; position `k` is state `k`
    /// of [`SubsystemWitness::system`].
    pub fn members(&self) -> Vec<usize> {
        self.subset.iter().copied().collect()
    }

    pub fn system(&self, label: &str) -> Result<System> {
        self.parent.restrict(&self.subset, label)
    }

    pub fn names(&self) -> Vec<&str> {
        self.subset
            .iter()
            .map(|&x| self.parent.states.name(x))
            .collect()
    }
}

use std::fmt;

use crate::error::{Error, Result};
use crate::finsys::{FinSet, TotalFn};

/// Which finite Markov category a kernel lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Left-total relations (possibilistic kernels).
    Rel,
    /// Row-stochastic tables with exact rational weights.
    Stoch,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Rel => "rel",
            Flavor::Stoch => "stoch",
        })
    }
}

/// Morphisms of a finite Markov category.
///
/// Implementors supply composition, tensor and the embedding of functions;
/// copy, delete and swap are derived from the latter.
pub trait Markov: Clone + PartialEq + fmt::Debug + Sized {
    const FLAVOR: Flavor;

    fn dom(&self) -> &FinSet;
    fn cod(&self) -> &FinSet;

    /// Embeds a function as a deterministic kernel.
    fn from_fn(f: &TotalFn) -> Self;

    /// Diagrammatic composite `self ⨟ next`.
    fn then(&self, next: &Self) -> Result<Self>;

    /// Parallel composite `self ⊗ other` on `dom × dom' → cod × cod'`.
    fn tensor(&self, other: &Self) -> Result<Self>;

    /// Whether row `x` is a singleton image or a point mass.
    fn is_row_deterministic(&self, x: usize) -> bool;

    /// Structural determinism: every row is deterministic.
    fn is_deterministic(&self) -> bool {
        self.dom().indices().all(|x| self.is_row_deterministic(x))
    }

    /// Whether row `x` of both kernels agree. Types must already match.
    fn row_eq(&self, other: &Self, x: usize) -> bool;

    fn describe_row(&self, x: usize) -> String;

    /// The relation `b ↦ f⁻¹(b)`; only meaningful for relations.
    fn preimage(f: &TotalFn) -> Result<Self>;

    /// The underlying function of a deterministic kernel.
    fn as_function(&self) -> Option<TotalFn>;

    fn identity(set: &FinSet) -> Self {
        Self::from_fn(&TotalFn::identity(set))
    }

    fn copy(set: &FinSet) -> Result<Self> {
        Ok(Self::from_fn(&TotalFn::diagonal(set)?))
    }

    fn del(set: &FinSet) -> Self {
        Self::from_fn(&TotalFn::to_unit(set))
    }

    fn swap(a: &FinSet, b: &FinSet) -> Result<Self> {
        Ok(Self::from_fn(&TotalFn::swap(a, b)?))
    }
}

/// A row where two sides of an equation disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowWitness {
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for RowWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: lhs {} vs rhs {}", self.input, self.lhs, self.rhs)
    }
}

/// Exact comparison of two kernels, row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationCheck {
    pub holds: bool,
    pub witnesses: Vec<RowWitness>,
}

/// Compares two kernels of the same type exactly.
pub fn compare<K: Markov>(context: &str, lhs: &K, rhs: &K) -> Result<EquationCheck> {
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return Err(Error::TypeMismatch {
            context: context.to_string(),
            expected: format!("{} -> {}", lhs.dom().describe(), lhs.cod().describe()),
            found: format!("{} -> {}", rhs.dom().describe(), rhs.cod().describe()),
        });
    }
    let witnesses: Vec<RowWitness> = lhs
        .dom()
        .indices()
        .filter(|&x| !lhs.row_eq(rhs, x))
        .map(|x| RowWitness {
            input: lhs.dom().name(x).to_string(),
            lhs: lhs.describe_row(x),
            rhs: rhs.describe_row(x),
        })
        .collect();
    Ok(EquationCheck {
        holds: witnesses.is_empty(),
        witnesses,
    })
}

/// Determinism by naturality of copy: `k ⨟ copy = copy ⨟ (k ⊗ k)`.
pub fn is_deterministic_equational<K: Markov>(k: &K) -> Result<bool> {
    let lhs = k.then(&K::copy(k.cod())?)?;
    let rhs = K::copy(k.dom())?.then(&k.tensor(k)?)?;
    Ok(compare("naturality of copy", &lhs, &rhs)?.holds)
}

pub(crate) fn type_mismatch(context: &str, expected: &FinSet, found: &FinSet) -> Error {
    Error::TypeMismatch {
        context: context.to_string(),
        expected: expected.describe(),
        found: found.describe(),
    }
}

use std::collections::{BTreeSet, HashMap};

use super::set::{pair_index, FinSet};
use crate::error::{Error, Result};

/// A total function between finite sets, stored as one codomain index per
/// domain element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalFn {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl TotalFn {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<TotalFn> {
        let what = format!("function {} -> {}", dom.label(), cod.label());
        if table.len() != dom.len() {
            let missing = dom
                .names()
                .get(table.len().min(dom.len()))
                .cloned()
                .unwrap_or_default();
            return Err(Error::NotTotal { what, missing });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::ImageOutOfRange {
                what,
                index: bad,
                size: cod.len(),
            });
        }
        Ok(TotalFn { dom, cod, table })
    }

    pub fn from_fn(dom: &FinSet, cod: &FinSet, f: impl Fn(usize) -> usize) -> Result<TotalFn> {
        TotalFn::new(dom.clone(), cod.clone(), dom.indices().map(f).collect())
    }

    /// Builds a table from `(argument, image)` name pairs; every domain
    /// element must appear exactly once.
    pub fn from_pairs<A: AsRef<str>, B: AsRef<str>>(
        what: &str,
        dom: &FinSet,
        cod: &FinSet,
        pairs: &[(A, B)],
    ) -> Result<TotalFn> {
        let mut table: Vec<Option<usize>> = vec![None; dom.len()];
        for (a, b) in pairs {
            let x = dom.lookup(a.as_ref())?;
            let y = cod.lookup(b.as_ref())?;
            if table[x].replace(y).is_some() {
                return Err(Error::DuplicateEntry {
                    what: what.to_string(),
                    element: a.as_ref().to_string(),
                });
            }
        }
        let mut out = Vec::with_capacity(dom.len());
        for (x, y) in table.into_iter().enumerate() {
            match y {
                Some(y) => out.push(y),
                None => {
                    return Err(Error::NotTotal {
                        what: what.to_string(),
                        missing: dom.name(x).to_string(),
                    })
                }
            }
        }
        TotalFn::new(dom.clone(), cod.clone(), out)
    }

    pub fn identity(set: &FinSet) -> TotalFn {
        TotalFn {
            dom: set.clone(),
            cod: set.clone(),
            table: set.indices().collect(),
        }
    }

    /// The unique map to the unit set.
    pub fn to_unit(set: &FinSet) -> TotalFn {
        TotalFn {
            dom: set.clone(),
            cod: FinSet::unit(),
            table: vec![0; set.len()],
        }
    }

    /// `x ↦ (x, x)`.
    pub fn diagonal(set: &FinSet) -> Result<TotalFn> {
        let n = set.len();
        TotalFn::from_fn(set, &FinSet::pair(set, set)?, |x| pair_index(x, x, n))
    }

    /// `(a, b) ↦ (b, a)`.
    pub fn swap(a: &FinSet, b: &FinSet) -> Result<TotalFn> {
        let (na, nb) = (a.len(), b.len());
        TotalFn::from_fn(&FinSet::pair(a, b)?, &FinSet::pair(b, a)?, |ab| {
            pair_index(ab % nb, ab / nb, na)
        })
    }

    /// `(a, b) ↦ a`.
    pub fn first(a: &FinSet, b: &FinSet) -> Result<TotalFn> {
        let nb = b.len();
        TotalFn::from_fn(&FinSet::pair(a, b)?, a, |ab| ab / nb)
    }

    /// `(a, b) ↦ b`.
    pub fn second(a: &FinSet, b: &FinSet) -> Result<TotalFn> {
        let nb = b.len();
        TotalFn::from_fn(&FinSet::pair(a, b)?, b, |ab| ab % nb)
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// Applies the function to an element given by name.
    pub fn apply_named(&self, x: &str) -> Result<&str> {
        Ok(self.cod.name(self.table[self.dom.lookup(x)?]))
    }

    /// Diagrammatic composition `self ⨟ next`.
    pub fn then(&self, next: &TotalFn) -> Result<TotalFn> {
        if self.cod != next.dom {
            return Err(Error::TypeMismatch {
                context: "function composition".into(),
                expected: next.dom.describe(),
                found: self.cod.describe(),
            });
        }
        Ok(TotalFn {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            table: self.table.iter().map(|&y| next.table[y]).collect(),
        })
    }

    /// Codomain elements with no preimage.
    pub fn unhit(&self) -> Vec<usize> {
        let hit: BTreeSet<usize> = self.table.iter().copied().collect();
        self.cod.indices().filter(|y| !hit.contains(y)).collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.unhit().is_empty()
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<usize> = self.table.iter().copied().collect();
        image.len() == self.table.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `f⁻¹(y)` for every `y` in the codomain, in domain order.
    pub fn fibres(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            out[y].push(x);
        }
        out
    }

    pub fn fibre(&self, y: usize) -> Vec<usize> {
        self.dom.indices().filter(|&x| self.table[x] == y).collect()
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Result<TotalFn> {
        if !self.is_bijective() {
            return Err(Error::NotBijective(format!(
                "{} -> {}",
                self.dom.label(),
                self.cod.label()
            )));
        }
        let mut table = vec![0; self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            table[y] = x;
        }
        Ok(TotalFn {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            table,
        })
    }

    /// Same table with different (but equal-as-sets) endpoints, e.g. to
    /// attach labels.
    pub fn retyped(&self, dom: &FinSet, cod: &FinSet) -> Result<TotalFn> {
        if *dom != self.dom || *cod != self.cod {
            return Err(Error::TypeMismatch {
                context: "retyping a function".into(),
                expected: format!("{} -> {}", self.dom.describe(), self.cod.describe()),
                found: format!("{} -> {}", dom.describe(), cod.describe()),
            });
        }
        Ok(TotalFn {
            dom: dom.clone(),
            cod: cod.clone(),
            table: self.table.clone(),
        })
    }

    /// Name pairs in domain order, for printing.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        self.table
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.dom.name(x), self.cod.name(y)))
            .collect()
    }

    pub fn as_map(&self) -> HashMap<&str, &str> {
        self.pairs().into_iter().collect()
    }
}

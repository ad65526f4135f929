use std::collections::BTreeSet;

use super::markov::{type_mismatch, Flavor, Markov};
use crate::error::{Error, Result};
use crate::finsys::{pair_index, FinSet, TotalFn};

/// A left-total relation `X → P⁺(Y)`: every element has a nonempty image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelKernel {
    dom: FinSet,
    cod: FinSet,
    image: Vec<BTreeSet<usize>>,
}

impl RelKernel {
    pub fn new(dom: FinSet, cod: FinSet, image: Vec<BTreeSet<usize>>) -> Result<RelKernel> {
        if image.len() != dom.len() {
            return Err(Error::NotTotal {
                what: format!("relation {} -> {}", dom.label(), cod.label()),
                missing: dom
                    .names()
                    .get(image.len().min(dom.len()))
                    .cloned()
                    .unwrap_or_default(),
            });
        }
        for (x, row) in image.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::NotLeftTotal(dom.name(x).to_string()));
            }
            if let Some(&y) = row.iter().find(|&&y| y >= cod.len()) {
                return Err(Error::ImageOutOfRange {
                    what: format!("relation {} -> {}", dom.label(), cod.label()),
                    index: y,
                    size: cod.len(),
                });
            }
        }
        Ok(RelKernel { dom, cod, image })
    }

    /// Builds a relation from named rows. Every domain element needs a row.
    pub fn from_named<A: AsRef<str>, B: AsRef<str>>(
        dom: &FinSet,
        cod: &FinSet,
        rows: &[(A, Vec<B>)],
    ) -> Result<RelKernel> {
        let mut image: Vec<Option<BTreeSet<usize>>> = vec![None; dom.len()];
        for (x, ys) in rows {
            let xi = dom.lookup(x.as_ref())?;
            let set = ys
                .iter()
                .map(|y| cod.lookup(y.as_ref()))
                .collect::<Result<BTreeSet<_>>>()?;
            if image[xi].replace(set).is_some() {
                return Err(Error::DuplicateEntry {
                    what: format!("relation {} -> {}", dom.label(), cod.label()),
                    element: x.as_ref().to_string(),
                });
            }
        }
        let image = image
            .into_iter()
            .enumerate()
            .map(|(x, row)| {
                row.ok_or_else(|| Error::NotTotal {
                    what: format!("relation {} -> {}", dom.label(), cod.label()),
                    missing: dom.name(x).to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RelKernel::new(dom.clone(), cod.clone(), image)
    }

    /// A point `1 → X` holding the given subset.
    pub fn from_subset(set: &FinSet, members: BTreeSet<usize>) -> Result<RelKernel> {
        RelKernel::new(FinSet::unit(), set.clone(), vec![members])
    }

    pub fn image(&self, x: usize) -> &BTreeSet<usize> {
        &self.image[x]
    }

    pub fn rows(&self) -> &[BTreeSet<usize>] {
        &self.image
    }

    /// Element names of the image of `x`.
    pub fn image_names(&self, x: usize) -> Vec<&str> {
        self.image[x].iter().map(|&y| self.cod.name(y)).collect()
    }

    /// Same rows with endpoints replaced by equal sets (e.g. relabelled).
    pub fn retyped(&self, dom: &FinSet, cod: &FinSet) -> Result<RelKernel> {
        if *dom != self.dom {
            return Err(type_mismatch("retyping a relation", &self.dom, dom));
        }
        if *cod != self.cod {
            return Err(type_mismatch("retyping a relation", &self.cod, cod));
        }
        Ok(RelKernel {
            dom: dom.clone(),
            cod: cod.clone(),
            image: self.image.clone(),
        })
    }
}

impl Markov for RelKernel {
    const FLAVOR: Flavor = Flavor::Rel;

    fn dom(&self) -> &FinSet {
        &self.dom
    }

    fn cod(&self) -> &FinSet {
        &self.cod
    }

    fn from_fn(f: &TotalFn) -> RelKernel {
        RelKernel {
            dom: f.dom().clone(),
            cod: f.cod().clone(),
            image: f.table().iter().map(|&y| BTreeSet::from([y])).collect(),
        }
    }

    fn then(&self, next: &RelKernel) -> Result<RelKernel> {
        if self.cod != next.dom {
            return Err(type_mismatch("sequential composition", &next.dom, &self.cod));
        }
        let image = self
            .image
            .iter()
            .map(|ys| ys.iter().flat_map(|&y| next.image[y].iter().copied()).collect())
            .collect();
        Ok(RelKernel {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            image,
        })
    }

    fn tensor(&self, other: &RelKernel) -> Result<RelKernel> {
        let dom = FinSet::pair(&self.dom, &other.dom)?;
        let cod = FinSet::pair(&self.cod, &other.cod)?;
        let (nd, nc) = (other.dom.len(), other.cod.len());
        let image = dom
            .indices()
            .map(|xx| {
                let (a, b) = (xx / nd, xx % nd);
                let mut row = BTreeSet::new();
                for &y in &self.image[a] {
                    for &z in &other.image[b] {
                        row.insert(pair_index(y, z, nc));
                    }
                }
                row
            })
            .collect();
        Ok(RelKernel { dom, cod, image })
    }

    fn is_row_deterministic(&self, x: usize) -> bool {
        self.image[x].len() == 1
    }

    fn row_eq(&self, other: &RelKernel, x: usize) -> bool {
        self.image[x] == other.image[x]
    }

    fn describe_row(&self, x: usize) -> String {
        format!("{{{}}}", self.image_names(x).join(", "))
    }

    fn preimage(f: &TotalFn) -> Result<RelKernel> {
        if let Some(&y) = f.unhit().first() {
            return Err(Error::NotSurjective(
                format!("{} -> {}", f.dom().label(), f.cod().label()),
                f.cod().name(y).to_string(),
            ));
        }
        let image = f
            .fibres()
            .into_iter()
            .map(|xs| xs.into_iter().collect())
            .collect();
        Ok(RelKernel {
            dom: f.cod().clone(),
            cod: f.dom().clone(),
            image,
        })
    }

    fn as_function(&self) -> Option<TotalFn> {
        if !self.is_deterministic() {
            return None;
        }
        let table = self.image.iter().map(|r| *r.iter().next().unwrap()).collect();
        TotalFn::new(self.dom.clone(), self.cod.clone(), table).ok()
    }
}

//! Finite sets with named elements and row-major products.
//!
//! Elements are addressed by index. A product `A × B` lays out `(a, b)` at
//! index `a * |B| + b`, so `(A × B) × C` and `A × (B × C)` share the same
//! layout and compare equal; only their printed element names differ. The
//! unit set `1 = {*}` is the empty product and is dropped from products.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of the single element of the unit set.
pub const UNIT_ELEMENT: &str = "*";

/// Default cap on the number of elements of any set, products included.
pub const DEFAULT_ELEMENT_CAP: usize = 4096;

static ELEMENT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ELEMENT_CAP);

/// Sets the process-wide cap on set sizes.
pub fn set_element_cap(cap: usize) {
    ELEMENT_CAP.store(cap.max(1), Ordering::Relaxed);
}

pub fn element_cap() -> usize {
    ELEMENT_CAP.load(Ordering::Relaxed)
}

#[derive(Debug)]
enum Kind {
    Atom,
    Product(Vec<FinSet>),
}

#[derive(Debug)]
struct Node {
    label: String,
    kind: Kind,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// A finite set of distinct, named elements.
#[derive(Clone)]
pub struct FinSet(Arc<Node>);

impl FinSet {
    /// Builds an atomic set. A set whose only element is `*` is the unit.
    pub fn new<S: Into<String>>(label: impl Into<String>, elements: Vec<S>) -> Result<FinSet> {
        let label = label.into();
        let names: Vec<String> = elements.into_iter().map(Into::into).collect();
        if names.len() == 1 && names[0] == UNIT_ELEMENT {
            return Ok(FinSet::unit());
        }
        if names.is_empty() {
            return Err(Error::EmptySet(label));
        }
        let cap = element_cap();
        if names.len() > cap {
            return Err(Error::SetTooLarge {
                size: names.len(),
                cap,
            });
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    set: label,
                    element: n.clone(),
                });
            }
        }
        Ok(FinSet(Arc::new(Node {
            label,
            kind: Kind::Atom,
            names,
            index,
        })))
    }

    /// Builds `{prefix0, prefix1, ...}` with `n` elements.
    pub fn numbered(label: impl Into<String>, prefix: &str, n: usize) -> Result<FinSet> {
        FinSet::new(label, (0..n).map(|i| format!("{prefix}{i}")).collect())
    }

    /// The distinguished one-element set `{*}`.
    pub fn unit() -> FinSet {
        let names = vec![UNIT_ELEMENT.to_string()];
        let index = HashMap::from([(UNIT_ELEMENT.to_string(), 0)]);
        FinSet(Arc::new(Node {
            label: "1".to_string(),
            kind: Kind::Product(Vec::new()),
            names,
            index,
        }))
    }

    /// Cartesian product. Unit factors are dropped; a single remaining factor
    /// is returned as is.
    pub fn product(factors: &[FinSet]) -> Result<FinSet> {
        let factors: Vec<FinSet> = factors.iter().filter(|f| !f.is_unit()).cloned().collect();
        match factors.len() {
            0 => return Ok(FinSet::unit()),
            1 => return Ok(factors[0].clone()),
            _ => {}
        }
        let cap = element_cap();
        let mut size: usize = 1;
        for f in &factors {
            size = size.saturating_mul(f.len());
        }
        if size > cap {
            return Err(Error::SetTooLarge { size, cap });
        }
        let mut names = Vec::with_capacity(size);
        let mut idx = vec![0usize; factors.len()];
        for _ in 0..size {
            let parts: Vec<&str> = idx
                .iter()
                .zip(&factors)
                .map(|(&i, f)| f.name(i))
                .collect();
            names.push(format!("({})", parts.join(",")));
            for k in (0..factors.len()).rev() {
                idx[k] += 1;
                if idx[k] < factors[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let label = factors
            .iter()
            .map(|f| {
                if f.is_product() {
                    format!("({})", f.label())
                } else {
                    f.label().to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" * ");
        Ok(FinSet(Arc::new(Node {
            label,
            kind: Kind::Product(factors),
            names,
            index,
        })))
    }

    pub fn pair(a: &FinSet, b: &FinSet) -> Result<FinSet> {
        FinSet::product(&[a.clone(), b.clone()])
    }

    /// An atomic set holding the named elements of `self` at `indices`, in
    /// the given order.
    pub fn subset(&self, label: impl Into<String>, indices: &[usize]) -> Result<FinSet> {
        FinSet::new(
            label,
            indices.iter().map(|&i| self.name(i).to_string()).collect(),
        )
    }

    /// Returns a copy carrying a different label. Products keep their factors.
    pub fn relabel(&self, label: impl Into<String>) -> FinSet {
        let kind = match &self.0.kind {
            Kind::Atom => Kind::Atom,
            Kind::Product(f) if f.is_empty() => return self.clone(),
            Kind::Product(f) => Kind::Product(f.clone()),
        };
        FinSet(Arc::new(Node {
            label: label.into(),
            kind,
            names: self.0.names.clone(),
            index: self.0.index.clone(),
        }))
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        matches!(&self.0.kind, Kind::Product(f) if f.is_empty())
    }

    pub fn is_product(&self) -> bool {
        matches!(&self.0.kind, Kind::Product(f) if !f.is_empty())
    }

    /// Top-level factors of a product; `None` for atoms and the unit.
    pub fn factors(&self) -> Option<&[FinSet]> {
        match &self.0.kind {
            Kind::Product(f) if !f.is_empty() => Some(f),
            _ => None,
        }
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    /// Like [`FinSet::index_of`] but reports the set on failure.
    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownElement {
            set: self.label().to_string(),
            element: name.to_string(),
        })
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// Atomic factors after flattening nested products.
    pub fn atoms(&self) -> Vec<FinSet> {
        match &self.0.kind {
            Kind::Atom => vec![self.clone()],
            Kind::Product(f) => f.iter().flat_map(FinSet::atoms).collect(),
        }
    }

    /// Short description used in type errors.
    pub fn describe(&self) -> String {
        let noun = if self.len() == 1 { "element" } else { "elements" };
        format!("{} ({} {noun})", self.label(), self.len())
    }
}

impl PartialEq for FinSet {
    /// Two sets are equal when their flattened atomic factors carry the same
    /// element names in the same order. Labels are ignored.
    fn eq(&self, other: &FinSet) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.len() != other.len() {
            return false;
        }
        let (a, b) = (self.atoms(), other.atoms());
        a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.0.names == y.0.names)
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.label(), self.names().join(", "))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Row-major index of `(a, b)` in `A × B`.
#[inline]
pub fn pair_index(a: usize, b: usize, size_b: usize) -> usize {
    a * size_b + b
}

/// Inverse of [`pair_index`].
#[inline]
pub fn split_pair(index: usize, size_b: usize) -> (usize, usize) {
    (index / size_b, index % size_b)
}

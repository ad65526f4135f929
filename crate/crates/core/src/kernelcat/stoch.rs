use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::markov::{type_mismatch, Flavor, Markov};
use super::rel::RelKernel;
use crate::error::{Error, Result};
use crate::finsys::{FinSet, TotalFn};

/// Exact rational number in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for `numer / denom`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A row-stochastic kernel with exact rational weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochKernel {
    dom: FinSet,
    cod: FinSet,
    rows: Vec<Vec<Rational>>,
}

impl StochKernel {
    /// Validates nonnegativity and exact normalisation of every row.
    pub fn new(dom: FinSet, cod: FinSet, rows: Vec<Vec<Rational>>) -> Result<StochKernel> {
        let what = format!("kernel {} -> {}", dom.label(), cod.label());
        if rows.len() != dom.len() {
            return Err(Error::NotTotal {
                what,
                missing: dom
                    .names()
                    .get(rows.len().min(dom.len()))
                    .cloned()
                    .unwrap_or_default(),
            });
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != cod.len() {
                return Err(Error::TypeMismatch {
                    context: format!("row `{}` of {what}", dom.name(x)),
                    expected: format!("{} weights", cod.len()),
                    found: format!("{} weights", row.len()),
                });
            }
            if let Some(w) = row.iter().find(|w| w.is_negative()) {
                return Err(Error::NegativeWeight {
                    row: dom.name(x).to_string(),
                    weight: w.to_string(),
                });
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::NotNormalised {
                    row: dom.name(x).to_string(),
                    sum: sum.to_string(),
                });
            }
        }
        Ok(StochKernel { dom, cod, rows })
    }

    /// Builds a kernel from named rows of `(codomain element, weight)`;
    /// unlisted entries are zero.
    pub fn from_named<A: AsRef<str>, B: AsRef<str>>(
        dom: &FinSet,
        cod: &FinSet,
        rows: &[(A, Vec<(B, Rational)>)],
    ) -> Result<StochKernel> {
        let what = format!("kernel {} -> {}", dom.label(), cod.label());
        let mut table: Vec<Option<Vec<Rational>>> = vec![None; dom.len()];
        for (x, entries) in rows {
            let xi = dom.lookup(x.as_ref())?;
            let mut row = vec![Rational::zero(); cod.len()];
            for (y, w) in entries {
                let yi = cod.lookup(y.as_ref())?;
                row[yi] += w;
            }
            if table[xi].replace(row).is_some() {
                return Err(Error::DuplicateEntry {
                    what,
                    element: x.as_ref().to_string(),
                });
            }
        }
        let rows = table
            .into_iter()
            .enumerate()
            .map(|(x, r)| {
                r.ok_or_else(|| Error::NotTotal {
                    what: what.clone(),
                    missing: dom.name(x).to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        StochKernel::new(dom.clone(), cod.clone(), rows)
    }

    /// A distribution `1 → X`.
    pub fn distribution(set: &FinSet, weights: Vec<Rational>) -> Result<StochKernel> {
        StochKernel::new(FinSet::unit(), set.clone(), vec![weights])
    }

    pub fn uniform(set: &FinSet) -> StochKernel {
        let w = rat(1, set.len() as i64);
        StochKernel {
            dom: FinSet::unit(),
            cod: set.clone(),
            rows: vec![vec![w; set.len()]],
        }
    }

    pub fn weight(&self, x: usize, y: usize) -> &Rational {
        &self.rows[x][y]
    }

    pub fn row(&self, x: usize) -> &[Rational] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// The support relation (a Markov functor into relations).
    pub fn support(&self) -> RelKernel {
        let image = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(y, _)| y)
                    .collect::<BTreeSet<_>>()
            })
            .collect();
        RelKernel::new(self.dom.clone(), self.cod.clone(), image).expect("rows sum to one")
    }

    pub fn retyped(&self, dom: &FinSet, cod: &FinSet) -> Result<StochKernel> {
        if *dom != self.dom {
            return Err(type_mismatch("retyping a kernel", &self.dom, dom));
        }
        if *cod != self.cod {
            return Err(type_mismatch("retyping a kernel", &self.cod, cod));
        }
        Ok(StochKernel {
            dom: dom.clone(),
            cod: cod.clone(),
            rows: self.rows.clone(),
        })
    }
}

impl Markov for StochKernel {
    const FLAVOR: Flavor = Flavor::Stoch;

    fn dom(&self) -> &FinSet {
        &self.dom
    }

    fn cod(&self) -> &FinSet {
        &self.cod
    }

    fn from_fn(f: &TotalFn) -> StochKernel {
        let rows = f
            .table()
            .iter()
            .map(|&y| {
                let mut row = vec![Rational::zero(); f.cod().len()];
                row[y] = Rational::one();
                row
            })
            .collect();
        StochKernel {
            dom: f.dom().clone(),
            cod: f.cod().clone(),
            rows,
        }
    }

    /// Chapman–Kolmogorov: `(f ⨟ g)(z|x) = Σ_y g(z|y) f(y|x)`.
    fn then(&self, next: &StochKernel) -> Result<StochKernel> {
        if self.cod != next.dom {
            return Err(type_mismatch("sequential composition", &next.dom, &self.cod));
        }
        let nz = next.cod.len();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![Rational::zero(); nz];
                for (y, w) in row.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    for (z, v) in next.rows[y].iter().enumerate() {
                        if !v.is_zero() {
                            out[z] += w * v;
                        }
                    }
                }
                out
            })
            .collect();
        Ok(StochKernel {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            rows,
        })
    }

    fn tensor(&self, other: &StochKernel) -> Result<StochKernel> {
        let dom = FinSet::pair(&self.dom, &other.dom)?;
        let cod = FinSet::pair(&self.cod, &other.cod)?;
        let nd = other.dom.len();
        let rows = dom
            .indices()
            .map(|xx| {
                let (a, b) = (xx / nd, xx % nd);
                let mut out = Vec::with_capacity(cod.len());
                for w in &self.rows[a] {
                    for v in &other.rows[b] {
                        out.push(w * v);
                    }
                }
                out
            })
            .collect();
        Ok(StochKernel { dom, cod, rows })
    }

    fn is_row_deterministic(&self, x: usize) -> bool {
        self.rows[x].iter().any(One::is_one)
    }

    fn row_eq(&self, other: &StochKernel, x: usize) -> bool {
        self.rows[x] == other.rows[x]
    }

    fn describe_row(&self, x: usize) -> String {
        let parts: Vec<String> = self.rows[x]
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(y, w)| format!("{}: {}", self.cod.name(y), w))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn preimage(_: &TotalFn) -> Result<StochKernel> {
        Err(Error::Unsupported(
            "preimages are relations and have no stochastic counterpart".into(),
        ))
    }

    fn as_function(&self) -> Option<TotalFn> {
        let table = self
            .rows
            .iter()
            .map(|r| r.iter().position(One::is_one))
            .collect::<Option<Vec<_>>>()?;
        TotalFn::new(self.dom.clone(), self.cod.clone(), table).ok()
    }
}

//! Bayesian inversion, conjugate priors, filtering and positivity, each
//! checked by building both sides of the defining equation as kernels and
//! comparing them exactly.
//!
//! Wire order: a hidden Markov model `κ : X → X ⊗ Y` emits the new hidden
//! state first and the observation second. Joints are laid out as `X ⊗ Y`.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::markov::{compare, type_mismatch, EquationCheck, Markov};
use super::rel::RelKernel;
use super::stoch::{rat, Rational, StochKernel};
use crate::error::{Error, Result};
use crate::finsys::FinSet;

/// A Bayesian inverse together with the rows fixed by convention because
/// their evidence is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayesInverse<K> {
    pub kernel: K,
    /// Observations with zero evidence whose row is a convention (uniform
    /// for stochastic kernels, the whole domain for relations).
    pub convention_rows: Vec<usize>,
}

fn require_point<K: Markov>(what: &str, p: &K) -> Result<()> {
    if !p.dom().is_unit() {
        return Err(type_mismatch(what, &FinSet::unit(), p.dom()));
    }
    Ok(())
}

fn require_cod<K: Markov>(context: &str, k: &K, expected: &FinSet) -> Result<()> {
    if k.cod() != expected {
        return Err(type_mismatch(context, expected, k.cod()));
    }
    Ok(())
}

fn require_dom<K: Markov>(context: &str, k: &K, expected: &FinSet) -> Result<()> {
    if k.dom() != expected {
        return Err(type_mismatch(context, expected, k.dom()));
    }
    Ok(())
}

/// Both sides of the inversion equation for `f : X → Y`, prior `p : 1 → X`
/// and candidate `f† : Y → X`, as joints `1 → X ⊗ Y`:
/// `p ⨟ copy ⨟ (id ⊗ f)` and `p ⨟ f ⨟ copy ⨟ (f† ⊗ id)`.
pub fn bayes_sides<K: Markov>(f: &K, p: &K, f_dag: &K) -> Result<(K, K)> {
    require_point("prior", p)?;
    require_cod("prior", p, f.dom())?;
    require_dom("inverse", f_dag, f.cod())?;
    require_cod("inverse", f_dag, f.dom())?;
    let (x, y) = (f.dom(), f.cod());
    let lhs = p.then(&K::copy(x)?)?.then(&K::identity(x).tensor(f)?)?;
    let rhs = p
        .then(f)?
        .then(&K::copy(y)?)?
        .then(&f_dag.tensor(&K::identity(y))?)?;
    Ok((lhs, rhs))
}

/// Checks that `f†` is a Bayesian inversion of `f` with respect to `p`.
pub fn check_bayes_inverse<K: Markov>(f: &K, p: &K, f_dag: &K) -> Result<EquationCheck> {
    let (lhs, rhs) = bayes_sides(f, p, f_dag)?;
    compare("Bayesian inversion", &lhs, &rhs)
}

/// Standard Bayes rule with exact rationals. Rows with zero evidence are
/// uniform on the domain.
pub fn bayes_invert_stoch(f: &StochKernel, p: &StochKernel) -> Result<BayesInverse<StochKernel>> {
    require_point("prior", p)?;
    require_cod("prior", p, f.dom())?;
    let (x, y) = (f.dom(), f.cod());
    let prior = p.row(0);
    let mut rows = Vec::with_capacity(y.len());
    let mut convention_rows = Vec::new();
    for yi in y.indices() {
        let joint: Vec<Rational> = x
            .indices()
            .map(|xi| &prior[xi] * f.weight(xi, yi))
            .collect();
        let evidence: Rational = joint.iter().sum();
        if evidence.is_zero() {
            convention_rows.push(yi);
            rows.push(vec![rat(1, x.len() as i64); x.len()]);
        } else {
            rows.push(joint.into_iter().map(|w| w / &evidence).collect());
        }
    }
    let kernel = StochKernel::new(y.clone(), x.clone(), rows)?;
    let check = check_bayes_inverse(f, p, &kernel)?;
    if !check.holds {
        return Err(Error::Internal(format!(
            "computed stochastic inverse fails its defining equation: {}",
            check.witnesses[0]
        )));
    }
    Ok(BayesInverse {
        kernel,
        convention_rows,
    })
}

/// Possibilistic Bayes: `f†(y) = {x ∈ supp p : y ∈ f(x)}`, or the whole
/// domain when `y` is unreachable.
pub fn bayes_invert_rel(f: &RelKernel, p: &RelKernel) -> Result<BayesInverse<RelKernel>> {
    require_point("prior", p)?;
    require_cod("prior", p, f.dom())?;
    let (x, y) = (f.dom(), f.cod());
    let support = p.image(0);
    let mut image = Vec::with_capacity(y.len());
    let mut convention_rows = Vec::new();
    for yi in y.indices() {
        let row: BTreeSet<usize> = support
            .iter()
            .copied()
            .filter(|&xi| f.image(xi).contains(&yi))
            .collect();
        if row.is_empty() {
            convention_rows.push(yi);
            image.push(x.indices().collect());
        } else {
            image.push(row);
        }
    }
    let kernel = RelKernel::new(y.clone(), x.clone(), image)?;
    let check = check_bayes_inverse(f, p, &kernel)?;
    if !check.holds {
        return Err(Error::Internal(format!(
            "computed possibilistic inverse fails its defining equation: {}",
            check.witnesses[0]
        )));
    }
    Ok(BayesInverse {
        kernel,
        convention_rows,
    })
}

/// Both sides of the parametrised inversion equation, as kernels
/// `Θ → X ⊗ Y`: `ψ ⨟ copy ⨟ (id ⊗ f)` and
/// `copy_Θ ⨟ ((ψ ⨟ f ⨟ copy_Y) ⊗ id_Θ) ⨟ (id_Y ⊗ swap) ⨟ (f† ⊗ id_Y)`.
pub fn param_bayes_sides<K: Markov>(f: &K, psi: &K, f_dag: &K) -> Result<(K, K)> {
    require_cod("parametrised prior", psi, f.dom())?;
    let (x, y, theta) = (f.dom(), f.cod(), psi.dom());
    require_dom("parametrised inverse", f_dag, &FinSet::pair(y, theta)?)?;
    require_cod("parametrised inverse", f_dag, x)?;
    let lhs = psi.then(&K::copy(x)?)?.then(&K::identity(x).tensor(f)?)?;
    let rhs = K::copy(theta)?
        .then(&psi.then(f)?.then(&K::copy(y)?)?.tensor(&K::identity(theta))?)?
        .then(&K::identity(y).tensor(&K::swap(y, theta)?)?)?
        .then(&f_dag.tensor(&K::identity(y))?)?;
    Ok((lhs, rhs))
}

/// Checks `f† : Y ⊗ Θ → X` against `f` and the family `ψ : Θ → X`. Witness
/// rows are parameters.
pub fn check_param_bayes_inverse<K: Markov>(f: &K, psi: &K, f_dag: &K) -> Result<EquationCheck> {
    let (lhs, rhs) = param_bayes_sides(f, psi, f_dag)?;
    compare("parametrised Bayesian inversion", &lhs, &rhs)
}

fn require_deterministic<K: Markov>(c: &K) -> Result<()> {
    if let Some(row) = c.dom().indices().find(|&x| !c.is_row_deterministic(x)) {
        return Err(Error::NotDeterministic(format!(
            "parameter update at `{}` is {}",
            c.dom().name(row),
            c.describe_row(row)
        )));
    }
    Ok(())
}

/// Checks that `ψ` is a conjugate prior to `f` with parameter update
/// `c : Y ⊗ Θ → Θ`, i.e. that `c ⨟ ψ` is a parametrised inverse of `f`.
pub fn check_conjugate_prior<K: Markov>(psi: &K, f: &K, c: &K) -> Result<EquationCheck> {
    require_deterministic(c)?;
    require_cod("parameter update", c, psi.dom())?;
    check_param_bayes_inverse(f, psi, &c.then(psi)?)
}

/// Both sides of the filtering inversion for `κ : X → X ⊗ Y`, prior `p` and
/// `κ† : Y → X`: `p ⨟ κ` and `p ⨟ κ ⨟ (del ⊗ id) ⨟ copy ⨟ (κ† ⊗ id)`.
pub fn filtering_sides<K: Markov>(kappa: &K, p: &K, kappa_dag: &K) -> Result<(K, K)> {
    require_point("prior", p)?;
    let x = kappa.dom();
    require_cod("prior", p, x)?;
    let y = kappa_dag.dom();
    require_cod("hidden Markov model", kappa, &FinSet::pair(x, y)?)?;
    require_cod("filtering inverse", kappa_dag, x)?;
    let lhs = p.then(kappa)?;
    let rhs = lhs
        .then(&K::del(x).tensor(&K::identity(y))?)?
        .then(&K::copy(y)?)?
        .then(&kappa_dag.tensor(&K::identity(y))?)?;
    Ok((lhs, rhs))
}

pub fn check_filtering_inverse<K: Markov>(kappa: &K, p: &K, kappa_dag: &K) -> Result<EquationCheck> {
    let (lhs, rhs) = filtering_sides(kappa, p, kappa_dag)?;
    compare("filtering inversion", &lhs, &rhs)
}

/// The hidden Markov model `copy ⨟ (id ⊗ f) : X → X ⊗ Y` that keeps the
/// hidden state fixed and observes it through `f`.
pub fn static_model<K: Markov>(f: &K) -> Result<K> {
    K::copy(f.dom())?.then(&K::identity(f.dom()).tensor(f)?)
}

/// Both sides of the consistency equation for `ψ : Θ → X`,
/// `κ : X → X ⊗ Y` and `c : Y ⊗ Θ → Θ`, as kernels `Θ → X ⊗ Y`:
/// `ψ ⨟ κ` and
/// `copy_Θ ⨟ ((ψ ⨟ κ ⨟ (del ⊗ id) ⨟ copy_Y) ⊗ id_Θ) ⨟ (id_Y ⊗ swap) ⨟ ((c ⨟ ψ) ⊗ id_Y)`.
pub fn consistency_sides<K: Markov>(psi: &K, kappa: &K, c: &K) -> Result<(K, K)> {
    let (theta, x) = (psi.dom(), psi.cod());
    require_dom("hidden Markov model", kappa, x)?;
    require_cod("parameter update", c, theta)?;
    let y_theta = c.dom();
    let y = match y_theta.factors() {
        Some(fs) if fs.len() == 2 && fs[1] == *theta => fs[0].clone(),
        _ if theta.is_unit() => y_theta.clone(),
        _ => {
            return Err(Error::TypeMismatch {
                context: "parameter update domain".into(),
                expected: format!("Y × {}", theta.describe()),
                found: y_theta.describe(),
            })
        }
    };
    require_cod("hidden Markov model", kappa, &FinSet::pair(x, &y)?)?;
    let lhs = psi.then(kappa)?;
    let observed = lhs
        .then(&K::del(x).tensor(&K::identity(&y))?)?
        .then(&K::copy(&y)?)?;
    let rhs = K::copy(theta)?
        .then(&observed.tensor(&K::identity(theta))?)?
        .then(&K::identity(&y).tensor(&K::swap(&y, theta)?)?)?
        .then(&c.then(psi)?.tensor(&K::identity(&y))?)?;
    Ok((lhs, rhs))
}

/// Checks the consistency equation of a Bayesian filtering interpretation.
/// Witness rows are parameters.
pub fn check_filtering_conjugate<K: Markov>(psi: &K, kappa: &K, c: &K) -> Result<EquationCheck> {
    require_deterministic(c)?;
    let (lhs, rhs) = consistency_sides(psi, kappa, c)?;
    compare("consistency equation", &lhs, &rhs)
}

/// Outcome of a positivity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// `f ⨟ g` is deterministic and the joint factors.
    Holds,
    /// `f ⨟ g` is deterministic but the joint does not factor.
    Fails(EquationCheck),
    /// `f ⨟ g` is not deterministic, so there is nothing to check.
    Vacuous,
}

/// When `f ⨟ g` is deterministic, checks
/// `f ⨟ copy ⨟ (g ⊗ id) = copy ⨟ ((f ⨟ g) ⊗ f)`.
pub fn check_positivity_instance<K: Markov>(f: &K, g: &K) -> Result<Positivity> {
    let fg = f.then(g)?;
    if !fg.is_deterministic() {
        return Ok(Positivity::Vacuous);
    }
    let b = f.cod();
    let lhs = f.then(&K::copy(b)?)?.then(&g.tensor(&K::identity(b))?)?;
    let rhs = K::copy(f.dom())?.then(&fg.tensor(f)?)?;
    let check = compare("positivity", &lhs, &rhs)?;
    Ok(if check.holds {
        Positivity::Holds
    } else {
        Positivity::Fails(check)
    })
}

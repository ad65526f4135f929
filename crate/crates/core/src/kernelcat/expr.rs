//! A small expression language for kernels: structural morphisms, named
//! functions and kernels, preimages, `;` and `⊗`.

use std::collections::BTreeMap;
use std::fmt;

use super::markov::{Flavor, Markov};
use super::rel::RelKernel;
use super::stoch::StochKernel;
use crate::error::{Error, Result};
use crate::finsys::{FinSet, TotalFn};

/// A set built from named sets, the unit and products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Named(String),
    Unit,
    Product(Vec<SetExpr>),
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Named(n) => f.write_str(n),
            SetExpr::Unit => f.write_str("1"),
            SetExpr::Product(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| match p {
                    SetExpr::Product(_) => format!("({p})"),
                    _ => p.to_string(),
                }).collect();
                f.write_str(&parts.join(" * "))
            }
        }
    }
}

/// A kernel expression. `Seq` is diagrammatic: `a ; b` runs `a` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelExpr {
    Id(SetExpr),
    Copy(SetExpr),
    Del(SetExpr),
    Swap(SetExpr, SetExpr),
    Named(String),
    FromFn(String),
    Preimage(String),
    Seq(Box<KernelExpr>, Box<KernelExpr>),
    Par(Box<KernelExpr>, Box<KernelExpr>),
}

impl KernelExpr {
    pub fn seq(a: KernelExpr, b: KernelExpr) -> KernelExpr {
        KernelExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn par(a: KernelExpr, b: KernelExpr) -> KernelExpr {
        KernelExpr::Par(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for KernelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelExpr::Id(s) => write!(f, "id[{s}]"),
            KernelExpr::Copy(s) => write!(f, "copy[{s}]"),
            KernelExpr::Del(s) => write!(f, "del[{s}]"),
            KernelExpr::Swap(a, b) => write!(f, "swap[{a},{b}]"),
            KernelExpr::Named(n) => f.write_str(n),
            KernelExpr::FromFn(n) => write!(f, "fn {n}"),
            KernelExpr::Preimage(n) => write!(f, "pre {n}"),
            KernelExpr::Seq(a, b) => match **b {
                KernelExpr::Seq(..) => write!(f, "{a} ; ({b})"),
                _ => write!(f, "{a} ; {b}"),
            },
            KernelExpr::Par(a, b) => {
                let wrap = |e: &KernelExpr| match e {
                    KernelExpr::Seq(..) => format!("({e})"),
                    _ => e.to_string(),
                };
                // both operators associate to the left
                let right = match **b {
                    KernelExpr::Par(..) | KernelExpr::Seq(..) => format!("({b})"),
                    _ => b.to_string(),
                };
                write!(f, "{} (x) {}", wrap(a), right)
            }
        }
    }
}

/// A kernel of either flavour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    Rel(RelKernel),
    Stoch(StochKernel),
}

impl Kernel {
    pub fn flavor(&self) -> Flavor {
        match self {
            Kernel::Rel(_) => Flavor::Rel,
            Kernel::Stoch(_) => Flavor::Stoch,
        }
    }

    pub fn dom(&self) -> &FinSet {
        match self {
            Kernel::Rel(k) => k.dom(),
            Kernel::Stoch(k) => k.dom(),
        }
    }

    pub fn cod(&self) -> &FinSet {
        match self {
            Kernel::Rel(k) => k.cod(),
            Kernel::Stoch(k) => k.cod(),
        }
    }

    pub fn describe_row(&self, x: usize) -> String {
        match self {
            Kernel::Rel(k) => k.describe_row(x),
            Kernel::Stoch(k) => k.describe_row(x),
        }
    }
}

/// Named sets, functions and kernels available to expressions.
#[derive(Clone, Debug, Default)]
pub struct ExprEnv {
    pub sets: BTreeMap<String, FinSet>,
    pub functions: BTreeMap<String, TotalFn>,
    pub kernels: BTreeMap<String, Kernel>,
}

impl ExprEnv {
    pub fn set(&self, e: &SetExpr) -> Result<FinSet> {
        match e {
            SetExpr::Named(n) => self
                .sets
                .get(n)
                .cloned()
                .ok_or_else(|| Error::UnknownName(format!("set `{n}`"))),
            SetExpr::Unit => Ok(FinSet::unit()),
            SetExpr::Product(parts) => {
                let parts = parts.iter().map(|p| self.set(p)).collect::<Result<Vec<_>>>()?;
                FinSet::product(&parts)
            }
        }
    }

    fn function(&self, name: &str) -> Result<&TotalFn> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::UnknownName(format!("function `{name}`")))
    }
}

trait FromEnv: Markov {
    fn from_kernel(name: &str, k: &Kernel) -> Result<Self>;
}

impl FromEnv for RelKernel {
    /// Stochastic kernels enter relations through their support.
    fn from_kernel(_: &str, k: &Kernel) -> Result<RelKernel> {
        Ok(match k {
            Kernel::Rel(r) => r.clone(),
            Kernel::Stoch(s) => s.support(),
        })
    }
}

impl FromEnv for StochKernel {
    fn from_kernel(name: &str, k: &Kernel) -> Result<StochKernel> {
        match k {
            Kernel::Stoch(s) => Ok(s.clone()),
            Kernel::Rel(_) => Err(Error::Unsupported(format!(
                "relation `{name}` has no stochastic interpretation"
            ))),
        }
    }
}

fn locate(err: Error, e: &KernelExpr) -> Error {
    match err {
        Error::TypeMismatch {
            context,
            expected,
            found,
        } if !context.contains(" in `") => Error::TypeMismatch {
            context: format!("{context} in `{e}`"),
            expected,
            found,
        },
        other => other,
    }
}

fn eval<K: FromEnv>(e: &KernelExpr, env: &ExprEnv) -> Result<K> {
    let k = match e {
        KernelExpr::Id(s) => K::identity(&env.set(s)?),
        KernelExpr::Copy(s) => K::copy(&env.set(s)?)?,
        KernelExpr::Del(s) => K::del(&env.set(s)?),
        KernelExpr::Swap(a, b) => K::swap(&env.set(a)?, &env.set(b)?)?,
        KernelExpr::Named(n) => {
            if let Some(k) = env.kernels.get(n) {
                K::from_kernel(n, k)?
            } else if let Some(f) = env.functions.get(n) {
                K::from_fn(f)
            } else {
                return Err(Error::UnknownName(format!("kernel `{n}`")));
            }
        }
        KernelExpr::FromFn(n) => K::from_fn(env.function(n)?),
        KernelExpr::Preimage(n) => K::preimage(env.function(n)?)?,
        KernelExpr::Seq(a, b) => {
            let (a, b) = (eval::<K>(a, env)?, eval::<K>(b, env)?);
            a.then(&b).map_err(|err| locate(err, e))?
        }
        KernelExpr::Par(a, b) => {
            let (a, b) = (eval::<K>(a, env)?, eval::<K>(b, env)?);
            a.tensor(&b).map_err(|err| locate(err, e))?
        }
    };
    Ok(k)
}

/// Evaluates an expression in the chosen category.
pub fn eval_expr(e: &KernelExpr, env: &ExprEnv, flavor: Flavor) -> Result<Kernel> {
    Ok(match flavor {
        Flavor::Rel => Kernel::Rel(eval::<RelKernel>(e, env)?),
        Flavor::Stoch => Kernel::Stoch(eval::<StochKernel>(e, env)?),
    })
}

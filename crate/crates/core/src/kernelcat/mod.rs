//! Finite Markov categories of left-total relations and exact stochastic
//! matrices, with Bayesian inversion and conjugate-prior checks.

pub mod bayes;
pub mod expr;
mod markov;
mod rel;
mod stoch;

pub use bayes::{
    bayes_invert_rel, bayes_invert_stoch, bayes_sides, check_bayes_inverse,
    check_conjugate_prior, check_filtering_conjugate, check_filtering_inverse,
    check_param_bayes_inverse, check_positivity_instance, consistency_sides, filtering_sides,
    param_bayes_sides, static_model, BayesInverse, Positivity,
};
pub use expr::{eval_expr, ExprEnv, Kernel, KernelExpr, SetExpr};
pub use markov::{compare, is_deterministic_equational, EquationCheck, Flavor, Markov, RowWitness};
pub use rel::RelKernel;
pub use stoch::{rat, Rational, StochKernel};

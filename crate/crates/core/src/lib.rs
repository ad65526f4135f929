//! Checking when one finite dynamical system models another, extracting such
//! models from environment/plant/controller loops, and verifying the
//! possibilistic Bayesian filtering interpretations they induce.
//!
//! - [`finsys`]: sets, functions, systems, maps of systems, model checks.
//! - [`impkit`]: the regulation pipeline from a composed loop to its models.
//! - [`kernelcat`]: left-total relations and exact-rational stochastic
//!   kernels, with Bayesian inversion and conjugacy checks.
//! - [`interp`]: fibres, closures and filtering interpretations of models.

pub mod error;
pub mod finsys;
pub mod impkit;
pub mod interp;
pub mod kernelcat;

pub use error::{Error, Result};

//! Matricvariate T-Riesz distributions and their relatives over the real,
//! complex and quaternion division algebras.

// `!(x > 0.0)` is used on purpose: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod config;
pub mod densities;
pub mod error;
pub mod hwv;
pub mod quad;
pub mod samplers;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};

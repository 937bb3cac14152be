//! Localized moment functionals for compressible Euler flows, the comparison
//! ODE they satisfy, and certificates of finite-time blowup built from them.
//!
//! The crate is organized bottom-up: [`model`] holds the weight function and
//! derived constants, [`moments`] evaluates the functionals on flow fields,
//! [`comparison`] solves the scalar comparison problems, [`certificates`]
//! turns them into verdicts, and [`solver`] produces fields to feed them.
// `!(x > y)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod comparison;
pub mod error;
pub mod field;
pub mod model;
pub mod moments;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};

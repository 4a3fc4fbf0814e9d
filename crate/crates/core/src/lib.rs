//! Two-dimensional gradient Ricci solitons through their profile ODE.
//!
//! A rotationally symmetric soliton metric `g = dr^2 + b(r)^2 dtheta^2` is
//! encoded by a positive function `a(t)` with `t = b^2/4` solving
//! `a' = 4 mu a^2 (a/gamma - 1)`. This crate integrates and classifies such
//! profiles, rebuilds the metrics, reports their global geometry and checks
//! the soliton equations and the variational characterisation numerically.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod taxonomy;
pub mod variational;
pub mod verify;
pub mod numeric;
pub mod ode;

pub use error::{Error, Result};

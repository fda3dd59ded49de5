//! Numerical toolkit for time-fractional mean field games.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fpsolver;
pub mod fracops;
pub mod grid;
pub mod hjbsolver;
pub mod linalg;
pub mod mfg;
pub mod special;
pub mod subdiffusion;

pub use error::{Error, Result};

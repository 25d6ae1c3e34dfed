//! Gate-time speed limits on SU(N) under positive-homogeneous constraints.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod geom;
pub mod json;
pub mod matcore;
pub mod phfun;

pub use config::Tolerances;
pub use error::{Error, Result};

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod error;
pub mod exec;
pub mod grid;
pub mod grushin;
pub mod heisenberg;
pub mod hermite;
pub mod moments;
pub mod quadrature;
pub mod riesz;
pub mod rng;
pub mod sweep;
pub mod transfer;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;

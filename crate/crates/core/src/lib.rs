//! Temperature jump and weak evaporation in the half-space BGK problem with
//! constant collision frequency, solved analytically through a scalar
//! Riemann–Hilbert factorization and checked against a discrete-ordinates solver.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod specfun;
pub mod riemann;
pub mod jumps;
pub mod spectrum;
pub mod profiles;
pub mod oracle;

pub use error::{Error, Result};
pub use numerics::QuadConfig;

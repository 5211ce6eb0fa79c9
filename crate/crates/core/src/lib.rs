//! Gamma smart path: the interpolating family between a positive source law
//! and a gamma target, with its density, information functionals and a
//! harness that checks the identities and inequalities relating them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod information;
pub mod laguerre;
pub mod measures;
pub mod numerics;
pub mod smartpath;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};

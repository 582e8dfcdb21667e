//! Explicit Néron–Tate height bounds for points of low rank on curves in
//! powers of an elliptic curve, with the supporting exact arithmetic and an
//! honest bounded search for rational points.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bounds;
pub mod cm;
pub mod constants;
pub mod divpoly;
pub mod elliptic;
pub(crate) mod enumerate;
pub mod error;
pub mod gnum;
pub mod heights;
pub mod klattice;
pub mod search;
pub mod selftest;

pub use error::{Error, Result};

// parameter guards are written `!(x > y)` so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod energy;
pub mod error;
pub mod extremal;
pub mod grid;
pub mod inequality;
pub mod minimize;
pub mod numeric;
pub mod rearrange;
pub mod selftest;

pub use error::{Error, Result};
pub use grid::{AffineMap, GridFunction, GridSpec, VectorField};

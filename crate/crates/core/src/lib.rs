#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod curves;
pub mod error;
pub mod flows;
pub mod helix;
pub mod manifold;
pub mod numerics;
pub mod theorems;

pub use error::{GeomError, ParseError, Result};

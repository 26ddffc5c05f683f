//! Location-scale ψ-tile regression toolkit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod divergences;
pub mod error;
pub mod estimation;
pub mod experiment;
pub mod function_classes;
pub mod psi_tile;
pub mod quadrature;
pub mod roots;
pub mod seeding;

pub use error::{Error, Result};

//! Scattering, S-matrix poles and wave-packet dynamics of a tight-binding
//! chain with alternating gain and loss.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod poles;
pub mod relevance;
pub mod scattering;

pub use error::{Error, Result};

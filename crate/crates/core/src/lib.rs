//! Real pair-eigenvalue spectra of the two-parameter block problem
//!
//! ```text
//! [ A - α    κ zzᵀ ] [u]
//! [ κ zzᵀ    B - β ] [v] = 0
//! ```
//!
//! with symmetric `A`, `B` and a unit coupling vector `z`.

// `!(x < y)` is used on purpose so that NaN fails the test
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod nsa;
pub mod oracle;
pub mod resolvent;
pub mod structure;
pub mod tracer;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};

//! Numerical laboratory for Hilbert geometry on properly convex domains.
//!
//! The crate is organised bottom up: [`projlin`] holds the projective and
//! linear-algebra substrate, [`domains`] the convex domain representations,
//! [`hilbert`] the metric and its coarse diagnostics, [`groups`] the group
//! dynamics and tracking sequences, [`regularity`] the boundary exponent
//! estimators and [`benzecri`] the normalization and rescaling experiments.

// NaN must fail the guards, and index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod benzecri;
mod dd;
pub mod domains;
pub mod error;
pub mod exec;
pub mod groups;
pub mod hilbert;
pub mod projlin;
pub mod regularity;
pub mod scenarios;
pub mod stats;

pub use error::{Error, Result};

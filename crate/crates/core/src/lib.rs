//! Denjoy-Wolff points of holomorphic self-maps of the bidisk: boundary
//! classification through directional-derivative curves, sampled Julia and
//! horosphere-invariance checks, and iteration dynamics.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod julia;
pub mod maps;
pub mod numerics;
pub mod sampling;

pub use error::{Error, Result};

/// Locale-free float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

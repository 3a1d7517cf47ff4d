//! One-shot parallel black-box optimization.
//!
//! A batch of `lambda` candidates is drawn up front, evaluated, ranked, and
//! reduced to a single recommendation. The recommendation is either the best
//! sample or the unweighted mean of the `mu` best, with `mu` chosen by a
//! budget/dimension rule or shrunk by a convex-hull test that detects
//! non-quasiconvexity among the selected points.
//!
//! Modules:
//! - [`sampling`]: uniform-ball, Gaussian and scrambled Hammersley designs;
//! - [`objectives`]: benchmark functions with known optima;
//! - [`estimators`]: ranking and recommendation rules;
//! - [`hull`]: interior-of-convex-hull membership through a small LP;
//! - [`analysis`]: closed-form oracles, rate fits and summary statistics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod hull;
pub mod objectives;
mod point;
pub mod sampling;

pub use error::{Error, Result};
pub use point::Point;

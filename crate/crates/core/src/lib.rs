//! Stick-breaking random probability measures: weight samplers, exact and
//! asymptotic weight-moment formulas, and a Monte Carlo harness for their
//! large-concentration limit theorems.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod error;
pub mod limits;
pub mod linalg;
pub mod measures;
pub mod moments;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod specialfn;
pub mod stats;
pub mod validation;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

/// Double-precision scalar used by the samplers and the experiment harness.
pub type Real64 = f64;
/// Exact rational scalar for the field-generic moment formulas.
pub type Rational = num_rational::Ratio<i128>;

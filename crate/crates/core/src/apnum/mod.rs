//! Arbitrary-precision binary floating point and numeric polynomials.
//!
//! Every [`ApFloat`] carries its own mantissa width; binary operations work
//! at the larger of the two and round to nearest-even.

pub mod elementary;
mod float;
mod numpoly;

use thiserror::Error;

pub use elementary::{cos, elementary, pi, sin, sqrt, Elementary};
pub use float::{ApFloat, MIN_PRECISION};
pub use numpoly::NumPoly;

/// Working precision used when none is requested.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApError {
    #[error("domain error: {0}")]
    Domain(String),
}

/// Nearest-even image of an exact rational at `prec` bits.
pub fn to_apfloat(q: &crate::ratpoly::ExactRational, prec: u32) -> ApFloat {
    ApFloat::from_rational(q, prec)
}

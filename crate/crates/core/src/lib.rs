//! Exact Diophantine approximation over the field of formal Laurent series
//! F_q((z^-1)): continued fractions, Ostrowski numeration, best approximations,
//! transference, singular-on-average statistics and the Cantor-type
//! survivor constructions used for dimension bounds.
//!
//! Norms are never floating point. Every norm is an integer exponent of `q`
//! ([`NormExp`]) and every Laurent series carries an explicit precision, so an
//! answer that would depend on unknown coefficients is refused rather than
//! guessed.

pub mod approx;
pub mod badset;
pub mod construct;
pub mod contfrac;
pub mod error;
pub mod field;
pub mod kernel;
pub mod laurent;
pub mod ostrowski;
pub mod poly;
pub mod singularity;
pub mod text;
pub mod transfer;

pub use error::{Error, ErrorClass, Result};
pub use field::{Field, FieldSpec, Fq};
pub use laurent::{bracket_dist, Laurent, LaurentMatrix, LaurentVec, NormExp, PolyVec};
pub use poly::Poly;

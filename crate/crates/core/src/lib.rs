//! Kazhdan–Lusztig bases, cells, and generalized Temperley–Lieb quotients for
//! finite Coxeter groups, computed exactly over `Z[v, v^-1]`.
//!
//! The algebraic types are generic over the integer coefficient width
//! ([`laurent::Coefficient`]); the aliases below fix it to `i64`, which is
//! what the verification drivers use.

pub mod cells;
pub mod coxeter;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod lincomb;
pub mod tl;
pub mod verify;

pub use error::{Error, Result};
pub use laurent::{Coefficient, LaurentPoly};
pub use lincomb::LinComb;

/// Laurent polynomial with `i64` coefficients.
pub type Poly = LaurentPoly<i64>;
/// Laurent polynomial with `i128` coefficients.
pub type WidePoly = LaurentPoly<i128>;

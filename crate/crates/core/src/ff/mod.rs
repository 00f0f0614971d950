//! Exact arithmetic in GF(p^n) and dense linear algebra over it.

mod echelon;
mod field;
mod matrix;

pub use echelon::{Offer, RowEchelon, TrackedEchelon};
pub use field::{field_arith, Elem, Field, FieldError, FieldOp, FieldSpec, MAX_ORDER};
pub use matrix::{LinalgError, Matrix, Rref};
pub(crate) use matrix::nullspace_from_rref;

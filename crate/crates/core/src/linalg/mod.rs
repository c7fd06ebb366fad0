//! Exact linear algebra over small finite fields.

mod dense;
mod echelon;
mod gf;
mod packed;
mod poly;

pub use dense::DenseMatrix;
pub use echelon::EchelonSpan;
pub use gf::{Elem, FieldContext, MAX_EXT_DEGREE, MAX_FIELD_DEGREE, MAX_ORDER, MAX_PRIME};
pub use packed::{BitMatrix, SlicedMatrix};
pub use poly::{GenericRank, Poly, PolyMatrix, DEFAULT_DEGREE_CAP, DEFAULT_WORK_BUDGET, MAX_DEGREE_CAP, MAX_VARS};

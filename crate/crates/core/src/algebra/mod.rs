//! Exact arithmetic substrate: complex rationals, Laurent polynomials,
//! vector fields, small matrices and sparse row reduction.

pub mod crational;
pub mod matrix;
pub mod poly;
pub mod sparse;
pub mod text;
pub mod upoly;

pub use crational::{parse_rational, CRational};
pub use matrix::CMatrix;
pub use poly::{default_names, poly_arith, quadratic_form, ArithOp, ExpVec, LaurentPoly, VField};
pub use text::parse_poly;
pub use upoly::UniPoly;

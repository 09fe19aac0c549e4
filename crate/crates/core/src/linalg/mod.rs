//! Exact linear algebra over ℚ and ℤ.

pub mod factor;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod normal_form;
pub mod order;
pub mod poly;

pub use factor::{factor_over_z, Factorization};
pub use field::{parse_rat, rat, rat_to_f64, ratio, Field, Rat, Rationals};
pub use lattice::{lattice_saturate, quotient_order, Lattice};
pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use normal_form::{hnf, snf, solve_integer, IntegerSolution};
pub use order::{cyclotomic, matrix_order, MatrixOrder};
pub use poly::{char_poly, char_poly_z, min_poly, Poly, PolyQ, PolyZ};

//! Exact-rational polynomial and symmetric matrix-polynomial algebra.

mod division;
mod exponent;
mod matpoly;
mod matrix;
mod poly;
pub mod rational;

pub use division::{exact_divide, lex_lead, lex_reduce};
pub use exponent::{basis_exponents, bidegree_exponents, binomial, Exponent};
pub use matpoly::{hessian_biform, BiFormMatPoly, MatPoly};
pub use matrix::RatMatrix;
pub use poly::{default_names, Poly};
pub use rational::Rat;

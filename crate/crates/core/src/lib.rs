//! Ramanujan-Fourier expansions of arithmetic functions of one and two
//! variables.
//!
//! - [`arith`]: factorizations, sieves and the classical arithmetic functions.
//! - [`ramanujan`]: Ramanujan sums `c_q(n)`.
//! - [`dirichlet2`]: two-variable Dirichlet convolution and multiplicative
//!   functions given by local grids.
//! - [`engine`]: coefficients by double sums, Euler products and the gcd-family
//!   formula; mean values; condition diagnostics.
//! - [`catalog`]: the built-in function families.
//! - [`series`]: truncated series, tail bounds and verification.

pub mod arith;
pub mod catalog;
pub mod dirichlet2;
pub mod engine;
pub mod error;
pub mod ramanujan;
pub mod scalar;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

//! Numerical toolkit for the semi-discrete modulus of smoothness Ω̃_{r,s}.
//!
//! The crate computes classical, local and averaged (τ) moduli, Steklov
//! averages, discrete seminorms over sampling nodes and K-functional
//! estimates, applies Bernstein, Shannon and generalized sampling operators,
//! and checks the resulting error estimates numerically.

pub mod discrete;
pub mod error;
pub mod func;
pub mod harness;
pub mod operators;
pub mod smoothness;
pub mod steklov;

pub use error::{Error, Result};

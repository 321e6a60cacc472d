//! Exact lowering of self-attention layers over binary inputs to rational
//! functions on the Boolean cube, with parity sign-representation checks and
//! rational approximation of ReLU post-processing.

pub mod attention;
pub mod compiler;
pub mod error;
pub mod fixtures;
pub mod parity;
pub mod poly;
pub mod rational;
pub mod relu;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
pub use poly::{CubePolynomial, Monomial, Polynomial};
pub use rational::ExactRational;

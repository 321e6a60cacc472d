//! Exact multivariate polynomials and their multilinear normal form on `{0,1}^n`.

mod cube;
mod monomial;
mod polynomial;

pub use cube::{bits_of, bitstring, CubePolynomial, DENSE_MAX_VARS};
pub use monomial::Monomial;
pub use polynomial::Polynomial;

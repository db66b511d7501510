use thiserror::Error;

use crate::gint::GInt;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero argument where a non-zero element is required")]
    Zero,
    #[error("{0} is even; an odd modulus is required")]
    EvenModulus(GInt),
    #[error("{0} is not square-free")]
    NotSquareFree(GInt),
    #[error("{0} is not primary")]
    NotPrimary(GInt),
    #[error("{0} is not a Gaussian prime")]
    NotPrime(GInt),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("tolerance {tol:e} not reachable: {reason}")]
    Tolerance { tol: f64, reason: String },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("cannot parse Gaussian integer from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

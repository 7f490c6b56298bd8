//! Exact multivariate polynomial arithmetic over the Gaussian rationals.

pub mod algebra;
pub mod gaussian;
pub mod multipoly;
pub mod parse;
pub mod univariate;

pub use algebra::{gcd, jacobian_det, resultant, resultant_by, split_components, squarefree};
pub use gaussian::GaussianRational;
pub use multipoly::{MultiPoly, PolyMap};
pub use parse::parse_poly;
pub use univariate::UniPoly;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("both polynomials are constant in '{0}'")]
    ConstantInVariable(String),
    #[error("components do not share one variable list")]
    VariableMismatch,
    #[error("real-coefficient input required")]
    NonReal,
}

/// Owned variable names from string slices.
pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

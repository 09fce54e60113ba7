//! Exact-rational and floating-point matrix kernels shared by every other
//! module.

mod matrix;
mod rank;
mod scalar;
mod solve;

use thiserror::Error;

pub use matrix::{FMat, Mat, Matrix, QMat};
pub use rank::{
    determinant, exact_invertible, exact_rank, float_invertible, float_rank, inverse, invertible,
    minor, rank, rref, RankMode, RankResult, DEFAULT_FLOAT_TOL,
};
pub use scalar::{
    format_rational, int, max_abs, parse_rational, rational_to_f64, ratio, serde_rational, Mode,
    Rational, Scalar,
};
pub use solve::{solve_in_span, solve_in_span_exact, solve_in_span_float, SpanSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix contains a NaN or infinite entry")]
    NonFiniteEntry,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square: {0:?}")]
    NotSquare((usize, usize)),
    #[error("mixed arithmetic modes: {0}")]
    MixedMode(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

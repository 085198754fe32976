//! Dense real linear algebra: products, spectral radius, largest singular
//! value and the ridge-regression solve.

mod eigen;
mod matrix;
mod ridge;

use thiserror::Error;

pub use eigen::{
    eigenvalues, largest_singular_value, spectral_radius, DEFAULT_TOL, POWER_ITERATION_BUDGET, QR_SWEEPS_PER_DIM,
};
pub use matrix::{gram_rows, mat_mul, Matrix};
pub use ridge::{solve_ridge, solve_ridge_normal};

pub(crate) use matrix::dot;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("{rows}x{cols} matrix needs {} entries, got {len}", rows * cols)]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{method} did not converge after {iterations} iterations (best estimate {estimate})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        estimate: f64,
    },
    #[error("system is singular at pivot {pivot} with gamma = {gamma}; use a positive gamma")]
    Singular { pivot: usize, gamma: f64 },
}

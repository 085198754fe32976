//! Independent reference implementations built on nalgebra.
#![allow(dead_code)]

use esn_ituc::linalg::Matrix;
use esn_ituc::rng::Rng;
use nalgebra::DMatrix;

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn uniform_matrix(rng: &mut Rng, rows: usize, cols: usize, low: f64, high: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform(low, high)).unwrap()
}

/// Largest eigenvalue modulus from nalgebra's real Schur form.
pub fn oracle_spectral_radius(m: &Matrix) -> f64 {
    to_na(m)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Largest singular value from nalgebra's SVD.
pub fn oracle_singular_value(m: &Matrix) -> f64 {
    to_na(m).singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `B Sᵀ (S Sᵀ + γ² I)⁻¹` with an explicit inverse.
pub fn oracle_ridge(s: &Matrix, b: &Matrix, gamma: f64) -> DMatrix<f64> {
    let s = to_na(s);
    let b = to_na(b);
    let n = s.nrows();
    let system = &s * s.transpose() + DMatrix::identity(n, n) * (gamma * gamma);
    b * s.transpose() * system.try_inverse().expect("oracle system is invertible")
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

/// Largest entry difference relative to the largest oracle entry.
pub fn rel_matrix_err(got: &Matrix, want: &DMatrix<f64>) -> f64 {
    let scale = want.amax().max(f64::MIN_POSITIVE);
    (to_na(got) - want).amax() / scale
}

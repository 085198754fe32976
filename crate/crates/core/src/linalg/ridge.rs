use super::matrix::{dot, gram_rows, Matrix};
use super::LinalgError;

/// Ridge readout `B Sᵀ (S Sᵀ + γ² I)⁻¹`.
///
/// `s` is `N_s × T` (one state per column), `b` is `N_b × T`. The regulariser
/// enters squared. The symmetric system is factored with Cholesky; no inverse
/// is ever formed.
pub fn solve_ridge(s: &Matrix, b: &Matrix, gamma: f64) -> Result<Matrix, LinalgError> {
    if s.cols() != b.cols() {
        return Err(LinalgError::Shape(format!(
            "states have {} columns but targets have {}",
            s.cols(),
            b.cols()
        )));
    }
    let gram = gram_rows(s);
    let cross = Matrix::from_fn(b.rows(), s.rows(), |i, j| dot(b.row(i), s.row(j)))?;
    solve_ridge_normal(gram, &cross, gamma)
}

/// Same solution from precomputed `S Sᵀ` (`N_s × N_s`) and `B Sᵀ` (`N_b × N_s`).
pub fn solve_ridge_normal(gram: Matrix, cross: &Matrix, gamma: f64) -> Result<Matrix, LinalgError> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(LinalgError::Parameter(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let n = gram.rows();
    if !gram.is_square() || cross.cols() != n {
        return Err(LinalgError::Shape(format!(
            "normal equations need square gram and matching cross term, got {}x{} and {}x{}",
            gram.rows(),
            gram.cols(),
            cross.rows(),
            cross.cols()
        )));
    }
    let mut system = gram.into_vec();
    let reg = gamma * gamma;
    for i in 0..n {
        system[i * n + i] += reg;
    }
    let factor = cholesky(system, n, gamma)?;
    // Each row of the readout solves M x = (B Sᵀ)ᵢᵀ since M is symmetric.
    let mut out = Vec::with_capacity(cross.rows() * n);
    for i in 0..cross.rows() {
        out.extend(factor.solve(cross.row(i)));
    }
    Matrix::from_vec(cross.rows(), n, out)
}

/// Lower-triangular Cholesky factor stored row-major.
struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

fn cholesky(mut a: Vec<f64>, n: usize, gamma: f64) -> Result<Cholesky, LinalgError> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let threshold = n as f64 * f64::EPSILON * max_diag;
    for j in 0..n {
        let (upper, lower) = a.split_at_mut((j + 1) * n);
        let row_j = &mut upper[j * n..];
        let d = row_j[j] - dot(&row_j[..j], &row_j[..j]);
        if !(d > threshold) {
            return Err(LinalgError::Singular { pivot: j, gamma });
        }
        let d = d.sqrt();
        row_j[j] = d;
        let row_j = &row_j[..j];
        for row_i in lower.chunks_exact_mut(n) {
            row_i[j] = (row_i[j] - dot(&row_i[..j], row_j)) / d;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
    Ok(Cholesky { n, l: a })
}

impl Cholesky {
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            y[i] = (y[i] - dot(row, &y[..i])) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let tail: f64 = (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum();
            y[i] = (y[i] - tail) / self.l[i * n + i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_without_regularisation() {
        let i3 = Matrix::identity(3);
        let w = solve_ridge(&i3, &i3, 0.0).unwrap();
        assert_eq!(w, i3);
    }

    #[test]
    fn identity_with_unit_gamma_halves() {
        let i3 = Matrix::identity(3);
        let w = solve_ridge(&i3, &i3, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert!((w.get(i, j) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn singular_without_gamma_is_reported() {
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(solve_ridge(&s, &b, 0.0), Err(LinalgError::Singular { .. })));
        assert!(solve_ridge(&s, &b, 0.1).is_ok());
    }

    #[test]
    fn zero_targets_give_zero_readout() {
        let s = Matrix::from_fn(3, 10, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0).unwrap();
        let b = Matrix::zeros(2, 10);
        let w = solve_ridge(&s, &b, 0.01).unwrap();
        assert!(w.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = Matrix::identity(2);
        let b = Matrix::zeros(1, 3);
        assert!(matches!(solve_ridge(&s, &b, 0.1), Err(LinalgError::Shape(_))));
        assert!(matches!(
            solve_ridge(&s, &Matrix::identity(2), -1.0),
            Err(LinalgError::Parameter(_))
        ));
    }
}

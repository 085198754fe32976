//! Dominant eigenvalue magnitude and largest singular value.
//!
//! The spectral radius goes through balancing, Householder reduction to upper
//! Hessenberg form and the Francis double-shift QR iteration, which handles
//! complex conjugate pairs without complex arithmetic. The largest singular
//! value is `sqrt(rho(A Aᵀ))`, found by power iteration on the symmetric
//! positive semidefinite product.

use super::matrix::{dot, gram_rows, Matrix};
use super::LinalgError;
use crate::rng::Rng;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const POWER_ITERATION_BUDGET: usize = 10_000;
/// QR sweeps allowed per matrix dimension.
pub const QR_SWEEPS_PER_DIM: usize = 100;

/// Largest eigenvalue magnitude of a square matrix.
pub fn spectral_radius(a: &Matrix, tol: f64) -> Result<f64, LinalgError> {
    check_tol(tol)?;
    if !a.is_square() {
        return Err(LinalgError::Shape(format!(
            "spectral radius needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let eigs = eigenvalues(a, tol)?;
    Ok(eigs.iter().map(|&(re, im)| re.hypot(im)).fold(0.0, f64::max))
}

/// All eigenvalues of a square matrix as `(re, im)` pairs, in no particular order.
pub fn eigenvalues(a: &Matrix, tol: f64) -> Result<Vec<(f64, f64)>, LinalgError> {
    check_tol(tol)?;
    if !a.is_square() {
        return Err(LinalgError::Shape(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut h = a.as_slice().to_vec();
    balance(&mut h, n);
    reduce_to_hessenberg(&mut h, n);
    // Deflation runs at machine precision unless a looser tolerance is asked for.
    let eps = f64::EPSILON.max(tol * 1e-6);
    hessenberg_qr(&mut h, n, eps, QR_SWEEPS_PER_DIM * n)
}

/// `sqrt(rho(a aᵀ))`, i.e. the matrix 2-norm.
pub fn largest_singular_value(a: &Matrix, tol: f64) -> Result<f64, LinalgError> {
    check_tol(tol)?;
    let gram = gram_rows(a);
    let lambda = dominant_symmetric_eigenvalue(&gram, tol, POWER_ITERATION_BUDGET)?;
    Ok(lambda.max(0.0).sqrt())
}

fn check_tol(tol: f64) -> Result<(), LinalgError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(LinalgError::Parameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// Power iteration for the largest eigenvalue of a symmetric PSD matrix.
///
/// Stops when either the residual `‖Mv − λv‖` drops below `tol·λ`, or the
/// geometric tail of the Rayleigh quotient sequence (which is monotone for
/// PSD input) is estimated below `tol·λ`. The second test covers matrices
/// whose two leading eigenvalues nearly coincide, where the eigenvector
/// converges far slower than the eigenvalue.
pub(crate) fn dominant_symmetric_eigenvalue(m: &Matrix, tol: f64, budget: usize) -> Result<f64, LinalgError> {
    let n = m.rows();
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut rng = Rng::new(0x005E_ED0F_E16E);
    let mut v = random_unit_vector(&mut rng, n);
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    let mut prev_delta = f64::NAN;

    for iteration in 0..budget {
        m.mul_vec_into(&v, &mut w);
        let norm_w = norm(&w);
        if norm_w == 0.0 {
            // Started inside the null space; try again elsewhere.
            v = random_unit_vector(&mut rng, n);
            continue;
        }
        // v is unit length only up to rounding.
        let rayleigh = dot(&v, &w) / dot(&v, &v);
        let residual = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - rayleigh * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * rayleigh.abs() {
            return Ok(rayleigh);
        }
        let delta = rayleigh - lambda;
        if iteration >= 2 && delta >= 0.0 && prev_delta > 0.0 {
            let ratio = delta / prev_delta;
            if ratio < 1.0 {
                let tail = delta * ratio / (1.0 - ratio);
                if tail.max(delta) <= tol * rayleigh {
                    return Ok(rayleigh);
                }
            }
        }
        prev_delta = delta;
        lambda = rayleigh;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm_w;
        }
    }
    Err(LinalgError::NotConverged {
        method: "power iteration",
        iterations: budget,
        estimate: lambda,
    })
}

fn random_unit_vector(rng: &mut Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.uniform(0.5, 1.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable. Leaves the eigenvalues unchanged.
fn balance(a: &mut [f64], n: usize) {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].abs();
                    r += a[i * n + j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= g;
                }
                for j in 0..n {
                    a[j * n + i] *= f;
                }
            }
        }
    }
}

/// Householder similarity reduction to upper Hessenberg form, in place.
fn reduce_to_hessenberg(a: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let v = &mut v[..len];
        for (idx, vi) in v.iter_mut().enumerate() {
            *vi = a[(k + 1 + idx) * n + k];
        }
        let tail_norm = v[1..].iter().map(|x| x * x).sum::<f64>();
        if tail_norm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let alpha = -x0.signum() * (x0 * x0 + tail_norm).sqrt();
        v[0] -= alpha;
        let vtv = v[0] * v[0] + tail_norm;
        let beta = 2.0 / vtv;

        // Left: rows k+1.., columns k..
        let w = &mut w[k..n];
        w.iter_mut().for_each(|x| *x = 0.0);
        for (idx, &vi) in v.iter().enumerate() {
            let row = &a[(k + 1 + idx) * n + k..(k + 2 + idx) * n];
            for (wj, &aij) in w.iter_mut().zip(row) {
                *wj += vi * aij;
            }
        }
        for (idx, &vi) in v.iter().enumerate() {
            let scale = beta * vi;
            let row = &mut a[(k + 1 + idx) * n + k..(k + 2 + idx) * n];
            for (aij, &wj) in row.iter_mut().zip(w.iter()) {
                *aij -= scale * wj;
            }
        }

        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a[i * n + k + 1..(i + 1) * n];
            let d = beta * dot(row, v);
            for (aij, &vj) in row.iter_mut().zip(v.iter()) {
                *aij -= d * vj;
            }
        }

        a[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.
///
/// Follows the classic EISPACK `hqr` scheme with exceptional shifts every ten
/// iterations on a stuck eigenvalue. `sweep_budget` caps the total number of
/// QR sweeps over all eigenvalues.
fn hessenberg_qr(a: &mut [f64], n: usize, eps: f64, sweep_budget: usize) -> Result<Vec<(f64, f64)>, LinalgError> {
    // 1-based accessors keep the index arithmetic readable.
    let at = |i: usize, j: usize| (i - 1) * n + (j - 1);
    let mut eig = vec![(0.0, 0.0); n + 1];

    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[at(i, j)].abs();
        }
    }

    let mut nn = n;
    let mut shift_total = 0.0;
    let mut sweeps = 0usize;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = a[at(l - 1, l - 1)].abs() + a[at(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[at(l, l - 1)].abs() <= eps * s {
                    a[at(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[at(nn, nn)];
            if l == nn {
                eig[nn] = (x + shift_total, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[at(nn - 1, nn - 1)];
            let mut w = a[at(nn, nn - 1)] * a[at(nn - 1, nn)];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += shift_total;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let hi = x + z;
                    let lo = if z != 0.0 { x - w / z } else { hi };
                    eig[nn - 1] = (hi, 0.0);
                    eig[nn] = (lo, 0.0);
                } else {
                    eig[nn - 1] = (x + p, -z);
                    eig[nn] = (x + p, z);
                }
                nn -= 2;
                break;
            }

            if sweeps >= sweep_budget {
                let found = eig[nn + 1..].iter().map(|&(re, im)| re.hypot(im));
                let pending = (1..=nn).map(|i| (a[at(i, i)] + shift_total).abs());
                return Err(LinalgError::NotConverged {
                    method: "Hessenberg QR",
                    iterations: sweeps,
                    estimate: found.chain(pending).fold(0.0, f64::max),
                });
            }
            if its > 0 && its.is_multiple_of(10) {
                // Exceptional shift.
                shift_total += x;
                for i in 1..=nn {
                    a[at(i, i)] -= x;
                }
                let s = a[at(nn, nn - 1)].abs() + a[at(nn - 1, nn - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            // Find two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[at(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[at(m + 1, m)] + a[at(m, m + 1)];
                q = a[at(m + 1, m + 1)] - z - rr - ss;
                r = a[at(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[at(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[at(m - 1, m - 1)].abs() + z.abs() + a[at(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                a[at(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[at(i, i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..nn and columns m..nn.
            for k in m..nn {
                if k != m {
                    p = a[at(k, k - 1)];
                    q = a[at(k + 1, k - 1)];
                    r = if k != nn - 1 { a[at(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[at(k, k - 1)] = -a[at(k, k - 1)];
                    }
                } else {
                    a[at(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pj = a[at(k, j)] + q * a[at(k + 1, j)];
                    if k != nn - 1 {
                        pj += r * a[at(k + 2, j)];
                        a[at(k + 2, j)] -= pj * z;
                    }
                    a[at(k + 1, j)] -= pj * y;
                    a[at(k, j)] -= pj * x;
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    let mut pi = x * a[at(i, k)] + y * a[at(i, k + 1)];
                    if k != nn - 1 {
                        pi += z * a[at(i, k + 2)];
                        a[at(i, k + 2)] -= pi * r;
                    }
                    a[at(i, k + 1)] -= pi * q;
                    a[at(i, k)] -= pi;
                }
            }
        }
    }
    eig.remove(0);
    Ok(eig)
}

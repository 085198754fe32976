//! Stability bounds of a reservoir matrix and the interval of scaling
//! factors between them.
//!
//! For a reservoir `W`, scaling by `alpha < 1/eta(W)` (largest singular
//! value) guarantees the echo state property for every input, while
//! `alpha > 1/rho(W)` (spectral radius) rules it out for inputs containing
//! the zero sequence. Scaling factors in `[1/eta, 1/rho]` are decided by
//! neither condition.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{largest_singular_value, spectral_radius, LinalgError, Matrix, DEFAULT_TOL};

#[derive(Debug, Error)]
pub enum EspError {
    #[error("spectral radius is zero (eta = {eta}); the interval is unbounded")]
    DegenerateSpectrum { eta: f64 },
    #[error("grid needs at least two points, got {0}")]
    GridTooSmall(usize),
    #[error("scaling factor must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    /// Largest singular value of the unscaled reservoir.
    pub eta: f64,
    /// Spectral radius of the unscaled reservoir.
    pub rho: f64,
    /// `1 / eta`.
    pub u_low: f64,
    /// `1 / rho`.
    pub u_high: f64,
}

impl SpectralBounds {
    pub fn from_values(eta: f64, rho: f64) -> Result<Self, EspError> {
        if !(rho > 0.0) {
            return Err(EspError::DegenerateSpectrum { eta });
        }
        Ok(Self {
            eta,
            rho,
            u_low: 1.0 / eta,
            u_high: 1.0 / rho,
        })
    }

    pub fn width(&self) -> f64 {
        self.u_high - self.u_low
    }

    pub fn contains(&self, alpha: f64) -> bool {
        classify_alpha(self, alpha) == Regime::Ituc
    }
}

pub fn compute_bounds(w_r_initial: &Matrix) -> Result<SpectralBounds, EspError> {
    let eta = largest_singular_value(w_r_initial, DEFAULT_TOL)?;
    let rho = spectral_radius(w_r_initial, DEFAULT_TOL)?;
    SpectralBounds::from_values(eta, rho)
}

/// `k` evenly spaced scaling factors from `u_low` to `u_high`, both included.
pub fn ituc_grid(bounds: &SpectralBounds, k: usize) -> Result<Vec<f64>, EspError> {
    if k < 2 {
        return Err(EspError::GridTooSmall(k));
    }
    let (lo, hi) = (bounds.u_low, bounds.u_high);
    let step = (hi - lo) / (k - 1) as f64;
    Ok((0..k)
        .map(|j| match j {
            0 => lo,
            j if j == k - 1 => hi,
            j => lo + j as f64 * step,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    /// `alpha * eta < 1`.
    Sufficient,
    /// Neither condition decides.
    Ituc,
    /// `alpha * rho > 1`.
    NecessaryViolated,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Sufficient => "SUFFICIENT",
            Regime::Ituc => "ITUC",
            Regime::NecessaryViolated => "NECESSARY_VIOLATED",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SUFFICIENT" => Ok(Regime::Sufficient),
            "ITUC" => Ok(Regime::Ituc),
            "NECESSARY_VIOLATED" => Ok(Regime::NecessaryViolated),
            other => Err(format!("unknown regime '{other}'")),
        }
    }
}

/// Boundary points `alpha·eta = 1` and `alpha·rho = 1` count as inside.
///
/// The comparison is made against the stored reciprocals, so every point of
/// [`ituc_grid`] classifies as [`Regime::Ituc`] exactly.
pub fn classify_alpha(bounds: &SpectralBounds, alpha: f64) -> Regime {
    if alpha < bounds.u_low {
        Regime::Sufficient
    } else if alpha > bounds.u_high {
        Regime::NecessaryViolated
    } else {
        Regime::Ituc
    }
}

/// [`classify_alpha`] with the positivity precondition checked.
pub fn try_classify_alpha(bounds: &SpectralBounds, alpha: f64) -> Result<Regime, EspError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(classify_alpha(bounds, alpha))
    } else {
        Err(EspError::InvalidAlpha(alpha))
    }
}

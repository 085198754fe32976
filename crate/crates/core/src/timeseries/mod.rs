//! Benchmark series: generators for the five dynamical systems, [0, 1]
//! normalisation, train/test splitting and CSV exchange.

mod csv;
mod generators;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::csv::{read_csv, write_csv, SeriesMeta};
pub use generators::{
    gen_henon, gen_lorenz, gen_mackey_glass, gen_mso, gen_rossler, rk4_step, HenonParams, LorenzParams,
    MackeyGlassParams, RosslerParams,
};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("map diverged at step {step} (|x| = {value:e})")]
    Divergence { step: usize, value: f64 },
    #[error("dimension {dim} is constant; cannot normalise")]
    DegenerateRange { dim: usize },
    #[error("need {needed} samples, series has {available}")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("sample {index} has length {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("non-finite value in sample {index}")]
    NonFinite { index: usize },
    #[error("unknown benchmark '{0}' (expected one of mackey-glass, mso, lorenz, rossler, henon)")]
    UnknownBenchmark(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Ordered multivariate samples, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dim: usize,
    dt: f64,
    data: Vec<f64>,
}

impl TimeSeries {
    pub fn from_flat(dim: usize, dt: f64, data: Vec<f64>) -> Result<Self, SeriesError> {
        if dim == 0 {
            return Err(SeriesError::Parameter("series dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(SeriesError::DimensionMismatch {
                index: data.len() / dim,
                expected: dim,
                got: data.len() % dim,
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(SeriesError::NonFinite { index: pos / dim });
        }
        Ok(Self { dim, dt, data })
    }

    pub fn from_samples(dim: usize, dt: f64, samples: &[Vec<f64>]) -> Result<Self, SeriesError> {
        if let Some((index, s)) = samples.iter().enumerate().find(|(_, s)| s.len() != dim) {
            return Err(SeriesError::DimensionMismatch {
                index,
                expected: dim,
                got: s.len(),
            });
        }
        Self::from_flat(dim, dt, samples.concat())
    }

    /// Scalar series with unit step.
    pub fn scalar(values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::from_flat(1, 1.0, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sample(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn samples(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Values of one dimension over time.
    pub fn component(&self, d: usize) -> Vec<f64> {
        self.samples().map(|s| s[d]).collect()
    }

    /// Contiguous sub-range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        Self {
            dim: self.dim,
            dt: self.dt,
            data: self.data[start * self.dim..end * self.dim].to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub washout: usize,
}

impl SplitSpec {
    pub fn new(n_train: usize, n_test: usize, washout: usize) -> Result<Self, SeriesError> {
        if n_train == 0 || n_test == 0 {
            return Err(SeriesError::Parameter("train and test sizes must be positive".into()));
        }
        if n_train <= washout {
            return Err(SeriesError::Parameter(format!(
                "training length {n_train} must exceed washout {washout}"
            )));
        }
        Ok(Self {
            n_train,
            n_test,
            washout,
        })
    }
}

/// Per-dimension `(min, max)` recorded by [`normalize_01`].
pub type Ranges = Vec<(f64, f64)>;

/// Affine map of every dimension onto [0, 1].
pub fn normalize_01(ts: &TimeSeries) -> Result<(TimeSeries, Ranges), SeriesError> {
    if ts.is_empty() {
        return Err(SeriesError::InsufficientSamples {
            needed: 1,
            available: 0,
        });
    }
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); ts.dim];
    for s in ts.samples() {
        for (r, &x) in ranges.iter_mut().zip(s) {
            r.0 = r.0.min(x);
            r.1 = r.1.max(x);
        }
    }
    if let Some(dim) = ranges.iter().position(|(lo, hi)| lo >= hi) {
        return Err(SeriesError::DegenerateRange { dim });
    }
    let data = ts
        .data
        .chunks_exact(ts.dim)
        .flat_map(|s| s.iter().zip(&ranges).map(|(&x, &(lo, hi))| (x - lo) / (hi - lo)))
        .collect();
    Ok((TimeSeries { data, ..*ts }, ranges))
}

/// Inverse of [`normalize_01`].
pub fn denormalize(ts: &TimeSeries, ranges: &[(f64, f64)]) -> Result<TimeSeries, SeriesError> {
    if ranges.len() != ts.dim {
        return Err(SeriesError::DimensionMismatch {
            index: 0,
            expected: ts.dim,
            got: ranges.len(),
        });
    }
    let data = ts
        .data
        .chunks_exact(ts.dim)
        .flat_map(|s| s.iter().zip(ranges).map(|(&x, &(lo, hi))| lo + x * (hi - lo)))
        .collect();
    Ok(TimeSeries { data, ..*ts })
}

/// Contiguous prefix (train) and the block right after it (test).
pub fn split(ts: &TimeSeries, spec: &SplitSpec) -> Result<(TimeSeries, TimeSeries), SeriesError> {
    let needed = spec.n_train + spec.n_test;
    if needed > ts.len() {
        return Err(SeriesError::InsufficientSamples {
            needed,
            available: ts.len(),
        });
    }
    Ok((ts.slice(0, spec.n_train), ts.slice(spec.n_train, needed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    MackeyGlass,
    Mso,
    Lorenz,
    Rossler,
    Henon,
}

impl Benchmark {
    pub const ALL: [Benchmark; 5] = [
        Benchmark::MackeyGlass,
        Benchmark::Mso,
        Benchmark::Lorenz,
        Benchmark::Rossler,
        Benchmark::Henon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::MackeyGlass => "mackey-glass",
            Benchmark::Mso => "mso",
            Benchmark::Lorenz => "lorenz",
            Benchmark::Rossler => "rossler",
            Benchmark::Henon => "henon",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Benchmark::Lorenz | Benchmark::Rossler => 3,
            _ => 1,
        }
    }

    /// Default train/test lengths.
    pub fn default_lengths(self) -> (usize, usize) {
        match self {
            Benchmark::MackeyGlass | Benchmark::Rossler | Benchmark::Henon => (10_000, 2_000),
            Benchmark::Mso => (10_000, 1_000),
            Benchmark::Lorenz => (13_107, 3_277),
        }
    }

    /// Raw (un-normalised) series of `n` samples with default parameters.
    /// Only the noisy MSO series consumes `seed`.
    pub fn generate_raw(self, n: usize, seed: u64) -> Result<TimeSeries, SeriesError> {
        match self {
            Benchmark::MackeyGlass => gen_mackey_glass(n, &MackeyGlassParams::default()),
            Benchmark::Mso => gen_mso(n, generators::MSO_NOISE_VARIANCE, seed),
            Benchmark::Lorenz => gen_lorenz(n, &LorenzParams::default()),
            Benchmark::Rossler => gen_rossler(n, &RosslerParams::default()),
            Benchmark::Henon => gen_henon(n, &HenonParams::default()),
        }
    }

    /// Series of `n` samples normalised to [0, 1] per dimension.
    pub fn generate(self, n: usize, seed: u64) -> Result<TimeSeries, SeriesError> {
        normalize_01(&self.generate_raw(n, seed)?).map(|(ts, _)| ts)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mackey-glass" | "mackeyglass" | "mg" => Ok(Benchmark::MackeyGlass),
            "mso" => Ok(Benchmark::Mso),
            "lorenz" => Ok(Benchmark::Lorenz),
            "rossler" => Ok(Benchmark::Rossler),
            "henon" => Ok(Benchmark::Henon),
            _ => Err(SeriesError::UnknownBenchmark(s.to_string())),
        }
    }
}

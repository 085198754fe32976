//! Sweep harness: every (reservoir size, scaling factor, trial) combination
//! of a benchmark, scored by NRMSE and MMDS, then averaged into surfaces.

mod aggregate;
mod csv;
mod plan;
mod sweep;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::timeseries::{Benchmark, SeriesError};

pub use aggregate::{aggregate, SurfaceCell, SurfaceGrid, Surfaces};
pub use csv::{read_results, surface_csv, surface_matrix, write_results, RESULTS_HEADER, SURFACE_HEADER};
pub use plan::{
    EvalMode, SweepPlan, DEFAULT_HORIZON, DEFAULT_MMDS_WINDOW, PROTOCOL_SIZES_MACKEY_GLASS, PROTOCOL_SIZES_OTHER,
};
pub use sweep::{cell_seed, run_plan, run_sweep, run_trial, train_and_score, SweepData, TrialScores};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("no records to aggregate")]
    Empty,
    #[error("records mix benchmarks {0} and {1}")]
    MixedBenchmarks(Benchmark, Benchmark),
    #[error("results line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("plan file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Ok,
    /// Two reservoir states in the MMDS window coincided.
    DegenerateMmds,
    /// A numerical step failed: bounds, training or scoring.
    NonConverged,
}

impl TrialStatus {
    pub fn label(self) -> &'static str {
        match self {
            TrialStatus::Ok => "ok",
            TrialStatus::DegenerateMmds => "degenerate-mmds",
            TrialStatus::NonConverged => "non-converged",
        }
    }
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TrialStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(TrialStatus::Ok),
            "degenerate-mmds" => Ok(TrialStatus::DegenerateMmds),
            "non-converged" => Ok(TrialStatus::NonConverged),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

/// One trial. Index fields are 1-based; unavailable measurements are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub benchmark: Benchmark,
    pub n_s: usize,
    pub size_index: usize,
    pub alpha_index: usize,
    pub trial_index: usize,
    pub seed: u64,
    pub alpha: f64,
    pub eta: f64,
    pub rho: f64,
    pub nrmse: f64,
    pub mmds: f64,
    pub status: TrialStatus,
}

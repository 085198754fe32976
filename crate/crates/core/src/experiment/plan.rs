use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::esn::DEFAULT_WASHOUT;
use crate::timeseries::Benchmark;

pub const PROTOCOL_SIZES_MACKEY_GLASS: [usize; 10] = [20, 50, 75, 100, 150, 200, 250, 500, 750, 1000];
pub const PROTOCOL_SIZES_OTHER: [usize; 10] = [20, 50, 75, 100, 150, 200, 250, 300, 400, 500];
pub const DEFAULT_HORIZON: usize = 84;
pub const DEFAULT_MMDS_WINDOW: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Closed loop: predictions are fed back as inputs.
    FreeRun,
    /// One step ahead on ground-truth inputs.
    TeacherForced,
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalMode::FreeRun => "free-run",
            EvalMode::TeacherForced => "teacher-forced",
        })
    }
}

/// Everything needed to reproduce one benchmark sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub benchmark: Benchmark,
    pub sizes: Vec<usize>,
    pub k_alphas: usize,
    pub n_trials: usize,
    pub gamma: f64,
    pub washout: usize,
    pub eval_mode: EvalMode,
    /// Free-run horizon in steps.
    pub horizon: usize,
    pub base_seed: u64,
    /// Training samples; the benchmark default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_train: Option<usize>,
    /// Test samples; the benchmark default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
    /// Length of the MMDS window at the end of the test segment.
    #[serde(default = "default_mmds_window")]
    pub mmds_window: usize,
}

fn default_mmds_window() -> usize {
    DEFAULT_MMDS_WINDOW
}

impl SweepPlan {
    /// Ten sizes, ten scaling factors, thirty trials: 3000 trials.
    pub fn protocol_default(benchmark: Benchmark) -> Self {
        let (sizes, gamma) = match benchmark {
            Benchmark::MackeyGlass => (PROTOCOL_SIZES_MACKEY_GLASS.to_vec(), 1e-4),
            _ => (PROTOCOL_SIZES_OTHER.to_vec(), 1e-3),
        };
        Self {
            benchmark,
            sizes,
            k_alphas: 10,
            n_trials: 30,
            gamma,
            washout: DEFAULT_WASHOUT,
            eval_mode: EvalMode::FreeRun,
            horizon: DEFAULT_HORIZON,
            base_seed: 0,
            n_train: None,
            n_test: None,
            mmds_window: DEFAULT_MMDS_WINDOW,
        }
    }

    pub fn n_train(&self) -> usize {
        self.n_train.unwrap_or(self.benchmark.default_lengths().0)
    }

    pub fn n_test(&self) -> usize {
        self.n_test.unwrap_or(self.benchmark.default_lengths().1)
    }

    pub fn total_trials(&self) -> usize {
        self.sizes.len() * self.k_alphas * self.n_trials
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: String| Err(ExperimentError::Plan(msg));
        if self.sizes.is_empty() {
            return fail("sizes must not be empty".into());
        }
        if self.sizes.contains(&0) {
            return fail("reservoir sizes must be positive".into());
        }
        if self.k_alphas < 2 {
            return fail(format!("k_alphas must be at least 2, got {}", self.k_alphas));
        }
        if self.n_trials == 0 {
            return fail("n_trials must be positive".into());
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be non-negative, got {}", self.gamma));
        }
        let (n_train, n_test) = (self.n_train(), self.n_test());
        // Training uses n_train - 1 input/target pairs.
        if n_train < self.washout + 2 {
            return fail(format!(
                "n_train = {n_train} leaves no training pairs after a washout of {}",
                self.washout
            ));
        }
        if self.eval_mode == EvalMode::FreeRun && self.horizon < 2 {
            return fail(format!("free-run horizon must be at least 2, got {}", self.horizon));
        }
        if self.eval_mode == EvalMode::FreeRun && self.horizon > n_test {
            return fail(format!("horizon {} exceeds n_test = {n_test}", self.horizon));
        }
        if self.mmds_window < 2 {
            return fail(format!("mmds_window must be at least 2, got {}", self.mmds_window));
        }
        if n_test < self.washout + self.mmds_window {
            return fail(format!(
                "n_test = {n_test} is shorter than washout + mmds_window = {}",
                self.washout + self.mmds_window
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let plan: Self = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serialises")
    }
}

use rayon::prelude::*;

use super::plan::{EvalMode, SweepPlan};
use super::{ExperimentError, SweepRecord, TrialStatus};
use crate::esn::{init_model, nrmse, EsnError, EsnModel, ReservoirConfig};
use crate::esp::{compute_bounds, ituc_grid, SpectralBounds};
use crate::linalg::mat_mul;
use crate::mmds::{mmds, MmdsError, MmdsWindow};
use crate::rng::mix_seed;
use crate::timeseries::{split, SplitSpec, TimeSeries};

/// Benchmark data shared read-only by every trial of a sweep.
#[derive(Debug, Clone)]
pub struct SweepData {
    /// Normalised series of `n_train + n_test` samples.
    pub series: TimeSeries,
    pub train: TimeSeries,
    pub test: TimeSeries,
}

impl SweepData {
    /// Generates the plan's benchmark series; the data seed is the base seed.
    pub fn prepare(plan: &SweepPlan) -> Result<Self, ExperimentError> {
        plan.validate()?;
        let (n_train, n_test) = (plan.n_train(), plan.n_test());
        let series = plan.benchmark.generate(n_train + n_test, plan.base_seed)?;
        let spec = SplitSpec::new(n_train, n_test, plan.washout)?;
        let (train, test) = split(&series, &spec)?;
        Ok(Self { series, train, test })
    }
}

/// Seed of the reservoir draw for one (size, trial) cell. Indices are the
/// 1-based values written to the results file.
pub fn cell_seed(base_seed: u64, size_index: usize, trial_index: usize) -> u64 {
    mix_seed(base_seed, &[size_index as u64, trial_index as u64])
}

/// One reservoir draw, shared by all scaling factors of a (size, trial) cell.
struct Cell {
    size_pos: usize,
    trial_pos: usize,
    seed: u64,
    base_model: Result<(EsnModel, SpectralBounds), String>,
}

impl Cell {
    fn draw(plan: &SweepPlan, size_pos: usize, trial_pos: usize) -> Self {
        let seed = cell_seed(plan.base_seed, size_pos + 1, trial_pos + 1);
        let dim = plan.benchmark.dim();
        let config = ReservoirConfig {
            gamma: plan.gamma,
            washout: plan.washout,
            seed,
            ..ReservoirConfig::new(plan.sizes[size_pos], dim, dim)
        };
        let base_model = init_model(&config)
            .map_err(|e| e.to_string())
            .and_then(|(model, w_r_initial)| {
                compute_bounds(&w_r_initial)
                    .map(|bounds| (model, bounds))
                    .map_err(|e| e.to_string())
            });
        Self {
            size_pos,
            trial_pos,
            seed,
            base_model,
        }
    }

    fn record(&self, plan: &SweepPlan, alpha_pos: usize) -> SweepRecord {
        SweepRecord {
            benchmark: plan.benchmark,
            n_s: plan.sizes[self.size_pos],
            size_index: self.size_pos + 1,
            alpha_index: alpha_pos + 1,
            trial_index: self.trial_pos + 1,
            seed: self.seed,
            alpha: f64::NAN,
            eta: f64::NAN,
            rho: f64::NAN,
            nrmse: f64::NAN,
            mmds: f64::NAN,
            status: TrialStatus::NonConverged,
        }
    }

    fn run(&self, plan: &SweepPlan, data: &SweepData, alpha_pos: usize) -> SweepRecord {
        let mut record = self.record(plan, alpha_pos);
        let (base, bounds) = match &self.base_model {
            Ok(pair) => pair,
            Err(msg) => {
                log::warn!(
                    "n_s={} trial={}: reservoir bounds failed: {msg}",
                    record.n_s,
                    record.trial_index
                );
                return record;
            }
        };
        record.eta = bounds.eta;
        record.rho = bounds.rho;
        let alpha = match ituc_grid(bounds, plan.k_alphas) {
            Ok(grid) => grid[alpha_pos],
            Err(e) => {
                log::warn!("{e}");
                return record;
            }
        };
        record.alpha = alpha;
        match evaluate(plan, data, base, alpha) {
            Ok(outcome) => {
                record.nrmse = outcome.nrmse;
                match outcome.mmds {
                    Ok(v) => {
                        record.mmds = v;
                        record.status = TrialStatus::Ok;
                    }
                    Err(e) => {
                        log::warn!(
                            "n_s={} alpha_index={} trial={}: {e}",
                            record.n_s,
                            record.alpha_index,
                            record.trial_index
                        );
                        record.status = TrialStatus::DegenerateMmds;
                    }
                }
            }
            Err(e) => log::warn!(
                "n_s={} alpha_index={} trial={}: {e}",
                record.n_s,
                record.alpha_index,
                record.trial_index
            ),
        }
        record
    }
}

/// Scores of one trained model on the test segment.
#[derive(Debug)]
pub struct TrialScores {
    /// One-step NRMSE over the whole test segment.
    pub teacher_forced: f64,
    /// Closed-loop NRMSE over the first `horizon` test steps, when requested.
    pub free_run: Option<f64>,
    /// MMDS over the final `mmds_window` teacher-forced test steps.
    pub mmds: Result<f64, MmdsError>,
}

/// Trains `model` on the training segment, then scores it on the test segment.
///
/// Training pairs are `(x[t], x[t+1])` inside the training segment. The test
/// phase continues from the final training state: teacher-forced outputs and
/// the MMDS states come from driving the reservoir with the true series, and
/// free-run predictions start right after the last training sample.
pub fn train_and_score(
    model: &mut EsnModel,
    data: &SweepData,
    horizon: Option<usize>,
    mmds_window: usize,
) -> Result<TrialScores, EsnError> {
    let n_train = data.train.len();
    let n_test = data.test.len();
    let inputs = data.series.slice(0, n_train - 1);
    let targets = data.series.slice(1, n_train);
    let end_state = model.fit(&inputs, &targets)?;

    // Inputs x[n_train-1 .. n_train+n_test-1] predict the whole test segment.
    let test_inputs = data.series.slice(n_train - 1, n_train + n_test - 1);
    let trajectory = model.harvest_from(&end_state, &test_inputs)?;
    let w_out = model.w_out().ok_or(EsnError::NotTrained)?;

    let outputs = mat_mul(w_out, &trajectory.states)?.transpose();
    let predicted = TimeSeries::from_flat(outputs.cols(), data.test.dt(), outputs.into_vec())?;
    let teacher_forced = nrmse(&predicted, &data.test)?;

    let free_run = match horizon {
        Some(h) => {
            if h > n_test {
                return Err(EsnError::Config(format!(
                    "horizon {h} exceeds the test length {n_test}"
                )));
            }
            let predicted = model.free_run_from(&trajectory.state(0), h, data.test.dt())?;
            Some(nrmse(&predicted, &data.test.slice(0, h))?)
        }
        None => None,
    };

    let window = MmdsWindow::tail(n_test, mmds_window);
    let mmds = mmds(&test_inputs, &trajectory, window);
    Ok(TrialScores {
        teacher_forced,
        free_run,
        mmds,
    })
}

struct Outcome {
    nrmse: f64,
    mmds: Result<f64, MmdsError>,
}

fn evaluate(plan: &SweepPlan, data: &SweepData, base: &EsnModel, alpha: f64) -> Result<Outcome, EsnError> {
    let mut model = base.with_alpha(alpha)?;
    let horizon = (plan.eval_mode == EvalMode::FreeRun).then_some(plan.horizon);
    let scores = train_and_score(&mut model, data, horizon, plan.mmds_window)?;
    Ok(Outcome {
        nrmse: scores.free_run.unwrap_or(scores.teacher_forced),
        mmds: scores.mmds,
    })
}

/// One trial at 0-based positions into the plan's size, alpha and trial axes.
pub fn run_trial(
    plan: &SweepPlan,
    data: &SweepData,
    size_pos: usize,
    alpha_pos: usize,
    trial_pos: usize,
) -> Result<SweepRecord, ExperimentError> {
    plan.validate()?;
    if size_pos >= plan.sizes.len() || alpha_pos >= plan.k_alphas || trial_pos >= plan.n_trials {
        return Err(ExperimentError::Plan(format!(
            "trial position ({size_pos}, {alpha_pos}, {trial_pos}) is outside the plan"
        )));
    }
    Ok(Cell::draw(plan, size_pos, trial_pos).run(plan, data, alpha_pos))
}

/// Every trial of the plan, ordered by size, then trial, then scaling factor.
///
/// Cells run on a pool of `workers` threads; the output does not depend on
/// the worker count.
pub fn run_sweep(plan: &SweepPlan, data: &SweepData, workers: usize) -> Result<Vec<SweepRecord>, ExperimentError> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Plan(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<(usize, usize)> = (0..plan.sizes.len())
        .flat_map(|s| (0..plan.n_trials).map(move |t| (s, t)))
        .collect();
    let per_cell: Vec<Vec<SweepRecord>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(size_pos, trial_pos)| {
                let cell = Cell::draw(plan, size_pos, trial_pos);
                let records: Vec<SweepRecord> = (0..plan.k_alphas).map(|a| cell.run(plan, data, a)).collect();
                log::debug!("finished n_s={} trial={}", plan.sizes[size_pos], trial_pos + 1);
                records
            })
            .collect()
    });
    let mut records: Vec<SweepRecord> = per_cell.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.size_index, r.trial_index, r.alpha_index));
    Ok(records)
}

/// Convenience: prepare the data and run the whole plan.
pub fn run_plan(plan: &SweepPlan, workers: usize) -> Result<Vec<SweepRecord>, ExperimentError> {
    let data = SweepData::prepare(plan)?;
    run_sweep(plan, &data, workers)
}

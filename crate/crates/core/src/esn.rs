//! Canonical echo state network: dense random reservoir, tanh state update,
//! ridge-regression readout without bias, teacher-forced and free-run
//! prediction, and the NRMSE score.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dot, solve_ridge_normal, LinalgError, Matrix};
use crate::rng::Rng;
use crate::timeseries::{SeriesError, TimeSeries};

/// Largest `f64` strictly below one. States are clamped to
/// `[-MAX_STATE, MAX_STATE]` so saturated `tanh` never reaches ±1.
pub const MAX_STATE: f64 = 1.0 - f64::EPSILON / 2.0;

pub const DEFAULT_WASHOUT: usize = 100;

/// Columns accumulated before each Gram-matrix update during training.
const GRAM_BLOCK: usize = 128;

#[derive(Debug, Error)]
pub enum EsnError {
    #[error("invalid reservoir configuration: {0}")]
    Config(String),
    #[error("{what}: expected dimension {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("model has no trained readout")]
    NotTrained,
    #[error("sequence of length {len} leaves nothing after a washout of {washout}")]
    TooShort { len: usize, washout: usize },
    #[error("target is constant over the evaluation window; NRMSE is undefined")]
    DegenerateTarget,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    /// Reservoir size.
    pub n_s: usize,
    /// Input dimension.
    pub n_a: usize,
    /// Output dimension.
    pub n_b: usize,
    pub init_low: f64,
    pub init_high: f64,
    /// Scaling factor applied to the initial reservoir matrix.
    pub alpha: f64,
    /// Ridge regulariser; enters the normal equations squared.
    pub gamma: f64,
    pub washout: usize,
    pub seed: u64,
}

impl ReservoirConfig {
    /// Defaults: weights on [-0.5, 0.5], alpha 1, gamma 1e-3, washout 100, seed 0.
    pub fn new(n_s: usize, n_a: usize, n_b: usize) -> Self {
        Self {
            n_s,
            n_a,
            n_b,
            init_low: -0.5,
            init_high: 0.5,
            alpha: 1.0,
            gamma: 1e-3,
            washout: DEFAULT_WASHOUT,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), EsnError> {
        let fail = |msg: String| Err(EsnError::Config(msg));
        if self.n_s == 0 || self.n_a == 0 || self.n_b == 0 {
            return fail(format!(
                "sizes must be positive (n_s={}, n_a={}, n_b={})",
                self.n_s, self.n_a, self.n_b
            ));
        }
        if !(self.init_low < self.init_high) || !self.init_low.is_finite() || !self.init_high.is_finite() {
            return fail(format!("init range [{}, {}] is empty", self.init_low, self.init_high));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be non-negative, got {}", self.gamma));
        }
        if self.n_s < self.n_a {
            log::warn!(
                "reservoir size {} is smaller than the input dimension {}",
                self.n_s,
                self.n_a
            );
        }
        Ok(())
    }
}

/// Reservoir states, one column per time step.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    /// `n_s × T`; column `t` is the state after consuming input `t`.
    pub states: Matrix,
    /// Index of the first post-washout column.
    pub t_offset: usize,
}

impl StateTrajectory {
    pub fn len(&self) -> usize {
        self.states.cols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state(&self, t: usize) -> Vec<f64> {
        self.states.column(t)
    }

    /// Number of columns at or after the washout offset.
    pub fn harvested_len(&self) -> usize {
        self.len() - self.t_offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsnModel {
    config: ReservoirConfig,
    /// `n_s × (n_a + 1)`; the last column holds the bias weights.
    w_in: Matrix,
    /// Always `alpha * w_r_initial`.
    w_r: Matrix,
    w_r_initial: Matrix,
    w_out: Option<Matrix>,
}

#[derive(Deserialize)]
struct RawModel {
    config: ReservoirConfig,
    w_in: Matrix,
    w_r: Matrix,
    w_r_initial: Matrix,
    w_out: Option<Matrix>,
}

/// Draws a dense reservoir and input matrix from the configured seed.
///
/// The reservoir is drawn first, then the input weights, both uniform on the
/// init range. The unscaled reservoir is returned alongside the model.
pub fn init_model(config: &ReservoirConfig) -> Result<(EsnModel, Matrix), EsnError> {
    config.validate()?;
    let mut rng = Rng::new(config.seed);
    let (lo, hi) = (config.init_low, config.init_high);
    let w_r_initial = Matrix::from_fn(config.n_s, config.n_s, |_, _| rng.uniform(lo, hi))?;
    let w_in = Matrix::from_fn(config.n_s, config.n_a + 1, |_, _| rng.uniform(lo, hi))?;
    let model = EsnModel::from_parts(config.clone(), w_in, w_r_initial.clone())?;
    Ok((model, w_r_initial))
}

impl EsnModel {
    /// Assembles an untrained model; the reservoir is `alpha * w_r_initial`.
    pub fn from_parts(config: ReservoirConfig, w_in: Matrix, w_r_initial: Matrix) -> Result<Self, EsnError> {
        config.validate()?;
        check_shape("input weights", &w_in, config.n_s, config.n_a + 1)?;
        check_shape("reservoir", &w_r_initial, config.n_s, config.n_s)?;
        let w_r = w_r_initial.scaled(config.alpha)?;
        Ok(Self {
            config,
            w_in,
            w_r,
            w_r_initial,
            w_out: None,
        })
    }

    /// Untrained copy sharing the same draws, rescaled to `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self, EsnError> {
        let config = ReservoirConfig {
            alpha,
            ..self.config.clone()
        };
        Self::from_parts(config, self.w_in.clone(), self.w_r_initial.clone())
    }

    pub fn config(&self) -> &ReservoirConfig {
        &self.config
    }

    pub fn w_in(&self) -> &Matrix {
        &self.w_in
    }

    pub fn w_r(&self) -> &Matrix {
        &self.w_r
    }

    pub fn w_r_initial(&self) -> &Matrix {
        &self.w_r_initial
    }

    pub fn w_out(&self) -> Option<&Matrix> {
        self.w_out.as_ref()
    }

    pub fn is_trained(&self) -> bool {
        self.w_out.is_some()
    }

    /// Installs a readout directly (`n_b × n_s`).
    pub fn set_readout(&mut self, w_out: Matrix) -> Result<(), EsnError> {
        check_shape("readout", &w_out, self.config.n_b, self.config.n_s)?;
        self.w_out = Some(w_out);
        Ok(())
    }

    /// One step of `s(t+1) = tanh(w_in [a; 1] + w_r s(t))`.
    pub fn update_state(&self, s: &[f64], a: &[f64]) -> Result<Vec<f64>, EsnError> {
        self.check_state(s)?;
        self.check_input("input", a.len())?;
        let mut out = vec![0.0; self.config.n_s];
        self.step_into(s, a, &mut out);
        Ok(out)
    }

    fn step_into(&self, s: &[f64], a: &[f64], out: &mut [f64]) {
        let n_a = self.config.n_a;
        let in_cols = n_a + 1;
        let w_in = self.w_in.as_slice();
        for (i, (o, row)) in out
            .iter_mut()
            .zip(self.w_r.as_slice().chunks_exact(s.len()))
            .enumerate()
        {
            let in_row = &w_in[i * in_cols..(i + 1) * in_cols];
            let drive = dot(&in_row[..n_a], a) + in_row[n_a];
            *o = (dot(row, s) + drive).tanh().clamp(-MAX_STATE, MAX_STATE);
        }
    }

    /// Drives the reservoir from `state` through `inputs`, calling `visit`
    /// with each new state.
    fn drive(&self, state: &mut Vec<f64>, inputs: &TimeSeries, mut visit: impl FnMut(usize, &[f64])) {
        let mut next = vec![0.0; self.config.n_s];
        for (t, a) in inputs.samples().enumerate() {
            self.step_into(state, a, &mut next);
            std::mem::swap(state, &mut next);
            visit(t, state);
        }
    }

    /// States from `s(0) = 0` over the whole input sequence.
    pub fn harvest(&self, inputs: &TimeSeries) -> Result<StateTrajectory, EsnError> {
        self.harvest_from(&vec![0.0; self.config.n_s], inputs)
    }

    /// States from an explicit initial state.
    pub fn harvest_from(&self, s0: &[f64], inputs: &TimeSeries) -> Result<StateTrajectory, EsnError> {
        self.check_state(s0)?;
        self.check_input("input series", inputs.dim())?;
        let len = inputs.len();
        let washout = self.config.washout;
        if len <= washout {
            return Err(EsnError::TooShort { len, washout });
        }
        let n_s = self.config.n_s;
        let mut data = vec![0.0; n_s * len];
        let mut state = s0.to_vec();
        self.drive(&mut state, inputs, |t, s| {
            for (i, &x) in s.iter().enumerate() {
                data[i * len + t] = x;
            }
        });
        Ok(StateTrajectory {
            states: Matrix::from_vec(n_s, len, data)?,
            t_offset: washout,
        })
    }

    /// Fits the readout by ridge regression on post-washout states.
    pub fn train(&mut self, inputs: &TimeSeries, targets: &TimeSeries) -> Result<(), EsnError> {
        self.fit(inputs, targets).map(|_| ())
    }

    /// [`train`](Self::train), returning the reservoir state after the last
    /// training input so prediction can continue from it.
    pub fn fit(&mut self, inputs: &TimeSeries, targets: &TimeSeries) -> Result<Vec<f64>, EsnError> {
        self.check_input("input series", inputs.dim())?;
        if targets.dim() != self.config.n_b {
            return Err(EsnError::Dimension {
                what: "target series",
                expected: self.config.n_b,
                got: targets.dim(),
            });
        }
        if targets.len() != inputs.len() {
            return Err(EsnError::Dimension {
                what: "target length",
                expected: inputs.len(),
                got: targets.len(),
            });
        }
        let washout = self.config.washout;
        if inputs.len() <= washout {
            return Err(EsnError::TooShort {
                len: inputs.len(),
                washout,
            });
        }

        let n_s = self.config.n_s;
        let n_b = self.config.n_b;
        let mut acc = NormalEquations::new(n_s, n_b);
        let mut state = vec![0.0; n_s];
        self.drive(&mut state, inputs, |t, s| {
            if t >= washout {
                acc.push(s, targets.sample(t));
            }
        });
        let (gram, cross) = acc.finish()?;
        self.w_out = Some(solve_ridge_normal(gram, &cross, self.config.gamma)?);
        Ok(state)
    }

    /// `y(t) = w_out s(t)` for every post-washout input, starting from `s(0) = 0`.
    pub fn predict_teacher_forced(&self, inputs: &TimeSeries) -> Result<TimeSeries, EsnError> {
        let w_out = self.readout()?;
        self.check_input("input series", inputs.dim())?;
        let washout = self.config.washout;
        if inputs.len() <= washout {
            return Err(EsnError::TooShort {
                len: inputs.len(),
                washout,
            });
        }
        let mut out = Vec::with_capacity((inputs.len() - washout) * self.config.n_b);
        let mut state = vec![0.0; self.config.n_s];
        self.drive(&mut state, inputs, |t, s| {
            if t >= washout {
                out.extend((0..w_out.rows()).map(|o| dot(w_out.row(o), s)));
            }
        });
        Ok(TimeSeries::from_flat(self.config.n_b, inputs.dt(), out)?)
    }

    /// One output per input, continuing from `state` (which is advanced).
    pub fn predict_teacher_forced_from(
        &self,
        state: &mut Vec<f64>,
        inputs: &TimeSeries,
    ) -> Result<TimeSeries, EsnError> {
        let w_out = self.readout()?;
        self.check_state(state)?;
        self.check_input("input series", inputs.dim())?;
        let mut out = Vec::with_capacity(inputs.len() * self.config.n_b);
        self.drive(state, inputs, |_, s| {
            out.extend((0..w_out.rows()).map(|o| dot(w_out.row(o), s)));
        });
        Ok(TimeSeries::from_flat(self.config.n_b, inputs.dt(), out)?)
    }

    /// Drives the reservoir with `warmup` from `s(0) = 0`, then feeds each
    /// output back as the next input for `horizon` steps.
    pub fn predict_free_run(&self, warmup: &TimeSeries, horizon: usize) -> Result<TimeSeries, EsnError> {
        self.readout()?;
        self.check_input("warmup series", warmup.dim())?;
        if warmup.is_empty() {
            return Err(EsnError::TooShort { len: 0, washout: 0 });
        }
        let mut state = vec![0.0; self.config.n_s];
        self.drive(&mut state, warmup, |_, _| {});
        self.free_run_from(&state, horizon, warmup.dt())
    }

    /// Closed-loop prediction from an already-driven state. The first output
    /// is `w_out · state`.
    pub fn free_run_from(&self, state: &[f64], horizon: usize, dt: f64) -> Result<TimeSeries, EsnError> {
        let w_out = self.readout()?;
        self.check_state(state)?;
        if self.config.n_a != self.config.n_b {
            return Err(EsnError::Dimension {
                what: "free-run feedback (n_b must equal n_a)",
                expected: self.config.n_a,
                got: self.config.n_b,
            });
        }
        let n_b = self.config.n_b;
        let mut out = Vec::with_capacity(horizon * n_b);
        let mut s = state.to_vec();
        let mut next = vec![0.0; self.config.n_s];
        let mut y = vec![0.0; n_b];
        for step in 0..horizon {
            if step > 0 {
                self.step_into(&s, &y, &mut next);
                std::mem::swap(&mut s, &mut next);
            }
            for (o, yo) in y.iter_mut().enumerate() {
                *yo = dot(w_out.row(o), &s);
            }
            out.extend_from_slice(&y);
        }
        Ok(TimeSeries::from_flat(n_b, dt, out)?)
    }

    pub fn to_json(&self) -> Result<String, EsnError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, EsnError> {
        let raw: RawModel = serde_json::from_str(text)?;
        let mut model = Self::from_parts(raw.config, raw.w_in, raw.w_r_initial)?;
        if model.w_r != raw.w_r {
            return Err(EsnError::Config(
                "stored reservoir is not alpha times the stored initial reservoir".into(),
            ));
        }
        if let Some(w_out) = raw.w_out {
            model.set_readout(w_out)?;
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), EsnError> {
        crate::io::write_atomic(path, self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, EsnError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn readout(&self) -> Result<&Matrix, EsnError> {
        self.w_out.as_ref().ok_or(EsnError::NotTrained)
    }

    fn check_state(&self, s: &[f64]) -> Result<(), EsnError> {
        if s.len() == self.config.n_s {
            Ok(())
        } else {
            Err(EsnError::Dimension {
                what: "state",
                expected: self.config.n_s,
                got: s.len(),
            })
        }
    }

    fn check_input(&self, what: &'static str, dim: usize) -> Result<(), EsnError> {
        if dim == self.config.n_a {
            Ok(())
        } else {
            Err(EsnError::Dimension {
                what,
                expected: self.config.n_a,
                got: dim,
            })
        }
    }
}

fn check_shape(what: &'static str, m: &Matrix, rows: usize, cols: usize) -> Result<(), EsnError> {
    if m.rows() != rows {
        return Err(EsnError::Dimension {
            what,
            expected: rows,
            got: m.rows(),
        });
    }
    if m.cols() != cols {
        return Err(EsnError::Dimension {
            what,
            expected: cols,
            got: m.cols(),
        });
    }
    Ok(())
}

/// Streaming accumulation of `S Sᵀ` and `B Sᵀ` in column blocks, so the
/// full state matrix is never stored.
struct NormalEquations {
    n_s: usize,
    n_b: usize,
    gram: Vec<f64>,
    cross: Vec<f64>,
    // Neuron-major block: states[i * GRAM_BLOCK + k] is neuron i at column k.
    states: Vec<f64>,
    targets: Vec<f64>,
    filled: usize,
}

impl NormalEquations {
    fn new(n_s: usize, n_b: usize) -> Self {
        Self {
            n_s,
            n_b,
            gram: vec![0.0; n_s * n_s],
            cross: vec![0.0; n_b * n_s],
            states: vec![0.0; n_s * GRAM_BLOCK],
            targets: vec![0.0; n_b * GRAM_BLOCK],
            filled: 0,
        }
    }

    fn push(&mut self, s: &[f64], b: &[f64]) {
        let k = self.filled;
        for (i, &x) in s.iter().enumerate() {
            self.states[i * GRAM_BLOCK + k] = x;
        }
        for (o, &x) in b.iter().enumerate() {
            self.targets[o * GRAM_BLOCK + k] = x;
        }
        self.filled += 1;
        if self.filled == GRAM_BLOCK {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let k = self.filled;
        if k == 0 {
            return;
        }
        let Self {
            n_s,
            n_b,
            gram,
            cross,
            states,
            targets,
            ..
        } = self;
        let n_s = *n_s;
        fn block_row(buf: &[f64], i: usize, k: usize) -> &[f64] {
            &buf[i * GRAM_BLOCK..i * GRAM_BLOCK + k]
        }
        for i in 0..n_s {
            let ri = block_row(states, i, k);
            for j in 0..=i {
                gram[i * n_s + j] += dot(ri, block_row(states, j, k));
            }
        }
        for o in 0..*n_b {
            let bo = block_row(targets, o, k);
            for i in 0..n_s {
                cross[o * n_s + i] += dot(bo, block_row(states, i, k));
            }
        }
        self.filled = 0;
    }

    fn finish(mut self) -> Result<(Matrix, Matrix), LinalgError> {
        self.flush();
        let n = self.n_s;
        for i in 0..n {
            for j in 0..i {
                self.gram[j * n + i] = self.gram[i * n + j];
            }
        }
        Ok((
            Matrix::from_vec(n, n, self.gram)?,
            Matrix::from_vec(self.n_b, n, self.cross)?,
        ))
    }
}

/// `sqrt(mean ‖b − y‖² / mean ‖b − mean(b)‖²)` over the whole window.
pub fn nrmse(y: &TimeSeries, b: &TimeSeries) -> Result<f64, EsnError> {
    if y.dim() != b.dim() {
        return Err(EsnError::Dimension {
            what: "prediction dimension",
            expected: b.dim(),
            got: y.dim(),
        });
    }
    if y.len() != b.len() {
        return Err(EsnError::Dimension {
            what: "prediction length",
            expected: b.len(),
            got: y.len(),
        });
    }
    if b.is_empty() {
        return Err(EsnError::TooShort { len: 0, washout: 0 });
    }
    let len = b.len() as f64;
    let dim = b.dim();
    let mut mean = vec![0.0; dim];
    for s in b.samples() {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= len);
    let mut err = 0.0;
    let mut spread = 0.0;
    for (ys, bs) in y.samples().zip(b.samples()) {
        for d in 0..dim {
            err += (bs[d] - ys[d]).powi(2);
            spread += (bs[d] - mean[d]).powi(2);
        }
    }
    if spread == 0.0 {
        return Err(EsnError::DegenerateTarget);
    }
    Ok((err / spread).sqrt())
}

//! Mean multidimensional scaling distance between the geometry of the input
//! window and the geometry of the reservoir states it produced:
//!
//! `MMDS = (1/|Δt|) Σ_{i<j} (L(i,j) − D(i,j))² / D(i,j)`
//!
//! with `L` the Euclidean distance between inputs, `D` between states. Each
//! unordered pair is counted once and the sum is divided by the number of
//! time steps in the window, not by the number of pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::esn::StateTrajectory;
use crate::timeseries::TimeSeries;

/// Pairs are unordered (`i < j`), each counted once.
pub const PAIR_CONVENTION: &str = "unordered";

#[derive(Debug, Error, PartialEq)]
pub enum MmdsError {
    #[error("window [{start}, {end}) does not fit: {reason}")]
    Window { start: usize, end: usize, reason: String },
    #[error("inputs have {inputs} steps but the trajectory has {states}")]
    Misaligned { inputs: usize, states: usize },
    #[error("reservoir states at steps {i} and {j} coincide")]
    DegeneratePair { i: usize, j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmdsWindow {
    pub start: usize,
    pub length: usize,
}

impl MmdsWindow {
    /// The last `length` steps of a sequence of `total` steps.
    pub fn tail(total: usize, length: usize) -> Self {
        let length = length.min(total);
        Self {
            start: total - length,
            length,
        }
    }

    fn end(&self) -> usize {
        self.start + self.length
    }
}

pub fn mmds(inputs: &TimeSeries, states: &StateTrajectory, window: MmdsWindow) -> Result<f64, MmdsError> {
    if inputs.len() != states.len() {
        return Err(MmdsError::Misaligned {
            inputs: inputs.len(),
            states: states.len(),
        });
    }
    let (start, end) = (window.start, window.end());
    let bad = |reason: String| MmdsError::Window { start, end, reason };
    if window.length == 0 {
        return Err(bad("window is empty".into()));
    }
    if end > inputs.len() {
        return Err(bad(format!("sequence has only {} steps", inputs.len())));
    }
    if start < states.t_offset {
        return Err(bad(format!(
            "starts inside the washout (first usable step {})",
            states.t_offset
        )));
    }
    let cols: Vec<Vec<f64>> = (start..end).map(|t| states.state(t)).collect();
    let points: Vec<&[f64]> = (start..end).map(|t| inputs.sample(t)).collect();
    mmds_points(&points, &cols).map_err(|e| match e {
        MmdsError::DegeneratePair { i, j } => MmdsError::DegeneratePair {
            i: i + start,
            j: j + start,
        },
        other => other,
    })
}

/// The same metric on explicit point lists; `inputs[k]` maps to `states[k]`.
pub fn mmds_points<A: AsRef<[f64]>, S: AsRef<[f64]>>(inputs: &[A], states: &[S]) -> Result<f64, MmdsError> {
    if inputs.len() != states.len() {
        return Err(MmdsError::Misaligned {
            inputs: inputs.len(),
            states: states.len(),
        });
    }
    let n = inputs.len();
    if n == 0 {
        return Err(MmdsError::Window {
            start: 0,
            end: 0,
            reason: "window is empty".into(),
        });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let l = euclidean(inputs[i].as_ref(), inputs[j].as_ref());
            let d = euclidean(states[i].as_ref(), states[j].as_ref());
            if d == 0.0 {
                return Err(MmdsError::DegeneratePair { i, j });
            }
            total += (l - d).powi(2) / d;
        }
    }
    Ok(total / n as f64)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn isometry_scores_zero() {
        let inputs = [[0.0], [1.0], [3.0]];
        let states = [[0.0, 0.0], [0.6, 0.8], [1.8, 2.4]];
        assert_eq!(mmds_points(&inputs, &states).unwrap(), 0.0);
    }

    #[test]
    fn two_point_window() {
        let inputs = [[0.0], [2.0]];
        let states = [[0.0], [1.0]];
        assert_eq!(mmds_points(&inputs, &states).unwrap(), 0.5);
    }

    #[test]
    fn three_collinear_inputs_equilateral_states() {
        let inputs = [[0.0], [1.0], [2.0]];
        let h = 3f64.sqrt() / 2.0;
        let states = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
        let got = mmds_points(&inputs, &states).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-15, "{got}");
    }

    #[test]
    fn coincident_states_are_reported() {
        let inputs = [[0.0], [1.0], [2.0]];
        let states = [[0.0], [1.0], [1.0]];
        assert_eq!(
            mmds_points(&inputs, &states),
            Err(MmdsError::DegeneratePair { i: 1, j: 2 })
        );
    }

    #[test]
    fn window_checks_against_washout() {
        let inputs = TimeSeries::scalar(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let traj = StateTrajectory {
            states: Matrix::from_rows(&[vec![0.0, 1.0, 2.0, 3.0]]).unwrap(),
            t_offset: 2,
        };
        assert!(matches!(
            mmds(&inputs, &traj, MmdsWindow { start: 1, length: 2 }),
            Err(MmdsError::Window { .. })
        ));
        assert!(matches!(
            mmds(&inputs, &traj, MmdsWindow { start: 3, length: 2 }),
            Err(MmdsError::Window { .. })
        ));
        assert_eq!(mmds(&inputs, &traj, MmdsWindow::tail(4, 2)).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_pair_indices_are_absolute() {
        let inputs = TimeSeries::scalar(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let traj = StateTrajectory {
            states: Matrix::from_rows(&[vec![0.0, 1.0, 5.0, 5.0]]).unwrap(),
            t_offset: 0,
        };
        assert_eq!(
            mmds(&inputs, &traj, MmdsWindow { start: 1, length: 3 }),
            Err(MmdsError::DegeneratePair { i: 2, j: 3 })
        );
    }
}

//! Echo state networks whose reservoirs are scaled between the two classic
//! stability bounds: `1/η` (largest singular value) and `1/ρ` (spectral
//! radius).
//!
//! - [`linalg`]: dense matrices, spectral radius, largest singular value, ridge solve.
//! - [`timeseries`]: benchmark generators, normalisation, splitting, series CSV.
//! - [`esn`]: reservoir model, training, prediction, NRMSE.
//! - [`esp`]: spectral bounds, the scaling-factor grid, regime classification.
//! - [`mmds`]: input/state pairwise-distance mismatch.
//! - [`experiment`]: sweep plans, seeded trials, aggregation, result files.
//! - [`cli`]: the `esn-ituc` command-line front end.

// Negated float comparisons are used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod esn;
pub mod esp;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod mmds;
pub mod rng;
pub mod timeseries;

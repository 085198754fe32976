use std::collections::BTreeMap;

use super::{ExperimentError, SweepRecord, TrialStatus};
use crate::timeseries::Benchmark;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCell {
    pub n_s: usize,
    /// 1-based.
    pub alpha_index: usize,
    /// Mean over valid trials; `None` when the cell has none.
    pub mean: Option<f64>,
    pub count: usize,
}

/// Trial means on the (reservoir size × alpha index) grid, size-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub sizes: Vec<usize>,
    pub k: usize,
    pub cells: Vec<SurfaceCell>,
}

impl SurfaceGrid {
    pub fn cell(&self, n_s: usize, alpha_index: usize) -> Option<&SurfaceCell> {
        let row = self.sizes.iter().position(|&s| s == n_s)?;
        (1..=self.k)
            .contains(&alpha_index)
            .then(|| &self.cells[row * self.k + alpha_index - 1])
    }

    /// Cell means of one size, indexed by alpha index - 1.
    pub fn row(&self, n_s: usize) -> Option<&[SurfaceCell]> {
        let row = self.sizes.iter().position(|&s| s == n_s)?;
        Some(&self.cells[row * self.k..(row + 1) * self.k])
    }

    pub fn missing_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.mean.is_none()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surfaces {
    pub benchmark: Benchmark,
    pub nrmse: SurfaceGrid,
    pub mmds: SurfaceGrid,
}

/// Averages status-ok records per (size, alpha index). Cells are keyed by
/// alpha index rather than alpha value, since every trial has its own
/// interval.
pub fn aggregate(records: &[SweepRecord]) -> Result<Surfaces, ExperimentError> {
    let first = records.first().ok_or(ExperimentError::Empty)?;
    let benchmark = first.benchmark;
    if let Some(other) = records.iter().find(|r| r.benchmark != benchmark) {
        return Err(ExperimentError::MixedBenchmarks(benchmark, other.benchmark));
    }
    let mut size_order: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records {
        size_order.entry(r.size_index).or_insert(r.n_s);
    }
    let sizes: Vec<usize> = size_order.values().copied().collect();
    let k = records.iter().map(|r| r.alpha_index).max().unwrap_or(0);

    let mut sums = vec![(0.0, 0.0, 0usize); sizes.len() * k];
    let row_of: BTreeMap<usize, usize> = size_order.keys().enumerate().map(|(row, &idx)| (idx, row)).collect();
    for r in records.iter().filter(|r| r.status == TrialStatus::Ok) {
        if r.alpha_index == 0 {
            continue;
        }
        let slot = &mut sums[row_of[&r.size_index] * k + r.alpha_index - 1];
        slot.0 += r.nrmse;
        slot.1 += r.mmds;
        slot.2 += 1;
    }
    let grid = |pick: fn(&(f64, f64, usize)) -> f64| SurfaceGrid {
        sizes: sizes.clone(),
        k,
        cells: sums
            .iter()
            .enumerate()
            .map(|(i, s)| SurfaceCell {
                n_s: sizes[i / k],
                alpha_index: i % k + 1,
                mean: (s.2 > 0).then(|| pick(s) / s.2 as f64),
                count: s.2,
            })
            .collect(),
    };
    Ok(Surfaces {
        benchmark,
        nrmse: grid(|s| s.0),
        mmds: grid(|s| s.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(size_index: usize, n_s: usize, alpha_index: usize, trial: usize, nrmse: f64, mmds: f64) -> SweepRecord {
        SweepRecord {
            benchmark: Benchmark::Mso,
            n_s,
            size_index,
            alpha_index,
            trial_index: trial,
            seed: 1,
            alpha: 0.1,
            eta: 2.0,
            rho: 1.0,
            nrmse,
            mmds,
            status: TrialStatus::Ok,
        }
    }

    #[test]
    fn identical_records_average_to_themselves() {
        let records: Vec<_> = (1..=30).map(|t| rec(1, 20, 1, t, 0.25, 3.0)).collect();
        let s = aggregate(&records).unwrap();
        let cell = s.nrmse.cell(20, 1).unwrap();
        assert_eq!(cell.mean, Some(0.25));
        assert_eq!(cell.count, 30);
        assert_eq!(s.mmds.cell(20, 1).unwrap().mean, Some(3.0));
    }

    #[test]
    fn failed_records_are_excluded() {
        let mut records: Vec<_> = (1..=30).map(|t| rec(1, 20, 1, t, t as f64, 1.0)).collect();
        records[4].status = TrialStatus::DegenerateMmds;
        records[4].mmds = f64::NAN;
        let s = aggregate(&records).unwrap();
        let cell = s.nrmse.cell(20, 1).unwrap();
        assert_eq!(cell.count, 29);
        let expected = ((1..=30).sum::<usize>() - 5) as f64 / 29.0;
        assert!((cell.mean.unwrap() - expected).abs() < 1e-12);
        assert_eq!(s.mmds.cell(20, 1).unwrap().mean, Some(1.0));
    }

    #[test]
    fn empty_cells_are_missing_not_zero() {
        let mut records = vec![
            rec(1, 20, 1, 1, 0.5, 1.0),
            rec(1, 20, 2, 1, 0.5, 1.0),
            rec(2, 50, 1, 1, 0.4, 2.0),
        ];
        records.push(SweepRecord {
            status: TrialStatus::NonConverged,
            ..rec(2, 50, 2, 1, f64::NAN, f64::NAN)
        });
        let s = aggregate(&records).unwrap();
        assert_eq!(s.nrmse.sizes, vec![20, 50]);
        assert_eq!(s.nrmse.k, 2);
        let missing = s.nrmse.cell(50, 2).unwrap();
        assert_eq!(missing.mean, None);
        assert_eq!(missing.count, 0);
        assert_eq!(s.nrmse.missing_cells(), 1);
    }

    #[test]
    fn empty_and_mixed_inputs_fail() {
        assert!(matches!(aggregate(&[]), Err(ExperimentError::Empty)));
        let mut other = rec(1, 20, 1, 1, 0.5, 1.0);
        other.benchmark = Benchmark::Henon;
        assert!(matches!(
            aggregate(&[rec(1, 20, 1, 1, 0.5, 1.0), other]),
            Err(ExperimentError::MixedBenchmarks(..))
        ));
    }
}

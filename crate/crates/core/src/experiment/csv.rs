//! Results and surface files. Floats use the shortest round-trip decimal
//! form; unavailable values are written as `NaN`.

use std::fmt::Write as _;
use std::io::BufRead;

use super::{ExperimentError, SurfaceGrid, Surfaces, SweepRecord, TrialStatus};

pub const RESULTS_HEADER: &str = "benchmark,n_s,size_index,alpha_index,trial,seed,alpha,eta,rho,nrmse,mmds,status";
pub const SURFACE_HEADER: &str = "n_s,alpha_index,mean_nrmse,mean_mmds,valid_count";

pub fn write_results(records: &[SweepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.benchmark.name(),
            r.n_s,
            r.size_index,
            r.alpha_index,
            r.trial_index,
            r.seed,
            r.alpha,
            r.eta,
            r.rho,
            r.nrmse,
            r.mmds,
            r.status
        );
    }
    out
}

/// Parses a results file. Errors carry the 1-based line number.
pub fn read_results<R: BufRead>(input: R) -> Result<Vec<SweepRecord>, ExperimentError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != RESULTS_HEADER {
        return Err(ExperimentError::Csv {
            line: 1,
            message: format!("expected header '{RESULTS_HEADER}'"),
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_row(line.trim()).map_err(|message| ExperimentError::Csv { line: line_no, message })?;
        records.push(record);
    }
    Ok(records)
}

fn parse_row(line: &str) -> Result<SweepRecord, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 12 {
        return Err(format!("expected 12 fields, found {}", fields.len()));
    }
    fn num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        s.parse().map_err(|e| format!("{name} '{s}': {e}"))
    }
    Ok(SweepRecord {
        benchmark: fields[0].parse().map_err(|e| format!("benchmark: {e}"))?,
        n_s: num("n_s", fields[1])?,
        size_index: num("size_index", fields[2])?,
        alpha_index: num("alpha_index", fields[3])?,
        trial_index: num("trial", fields[4])?,
        seed: num("seed", fields[5])?,
        alpha: num("alpha", fields[6])?,
        eta: num("eta", fields[7])?,
        rho: num("rho", fields[8])?,
        nrmse: num("nrmse", fields[9])?,
        mmds: num("mmds", fields[10])?,
        status: fields[11].parse::<TrialStatus>()?,
    })
}

fn mean_text(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |m| m.to_string())
}

/// One row per (size, alpha index) cell; missing means are `NaN` with a
/// zero count.
pub fn surface_csv(surfaces: &Surfaces) -> String {
    let mut out = String::from(SURFACE_HEADER);
    out.push('\n');
    for (a, b) in surfaces.nrmse.cells.iter().zip(&surfaces.mmds.cells) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            a.n_s,
            a.alpha_index,
            mean_text(a.mean),
            mean_text(b.mean),
            a.count
        );
    }
    out
}

/// Gnuplot `nonuniform matrix` text: the first row holds the column count
/// and the alpha indices, each following row a size and its cell means.
pub fn surface_matrix(grid: &SurfaceGrid) -> String {
    let mut out = String::new();
    out.push_str(&grid.k.to_string());
    for a in 1..=grid.k {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for (row, n_s) in grid.sizes.iter().enumerate() {
        out.push_str(&n_s.to_string());
        for cell in &grid.cells[row * grid.k..(row + 1) * grid.k] {
            out.push(' ');
            out.push_str(&mean_text(cell.mean));
        }
        out.push('\n');
    }
    out
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure. Output
//! files are written atomically; `ITUC_OUT_DIR` sets the default output
//! directory.

use std::ffi::OsString;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use thiserror::Error;

use crate::esn::{init_model, EsnError, ReservoirConfig, DEFAULT_WASHOUT};
use crate::esp::{classify_alpha, compute_bounds, EspError, SpectralBounds};
use crate::experiment::{
    aggregate, read_results, run_sweep, surface_csv, surface_matrix, train_and_score, write_results, ExperimentError,
    Surfaces, SweepData, SweepPlan, SweepRecord, TrialStatus, DEFAULT_HORIZON, DEFAULT_MMDS_WINDOW,
};
use crate::io::write_atomic;
use crate::linalg::{LinalgError, Matrix};
use crate::timeseries::{write_csv, Benchmark, SeriesError, SeriesMeta};

pub const OUT_DIR_ENV: &str = "ITUC_OUT_DIR";
pub const RESULTS_FILE: &str = "results.csv";
pub const SURFACE_FILE: &str = "surface.csv";
pub const NRMSE_MATRIX_FILE: &str = "nrmse_matrix.txt";
pub const MMDS_MATRIX_FILE: &str = "mmds_matrix.txt";

#[derive(Debug, Parser)]
#[command(name = "esn-ituc", version, about = "Echo state network scaling-factor experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a normalised benchmark series as CSV.
    Generate(GenerateArgs),
    /// Print the spectral bounds of a reservoir matrix.
    Bounds(BoundsArgs),
    /// Train one reservoir on a benchmark and print its test scores.
    Train(TrainArgs),
    /// Run a sweep plan and write per-trial results and the surface.
    Sweep(SweepArgs),
    /// Aggregate a results file into surfaces and gnuplot matrices.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub benchmark: Benchmark,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to `<benchmark>.csv` in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["matrix", "random"])))]
pub struct BoundsArgs {
    /// CSV file with one matrix row per line.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Draw an N x N reservoir on [-0.5, 0.5].
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0, requires = "random")]
    pub seed: u64,
    /// Classify this scaling factor.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub benchmark: Benchmark,
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    /// Scaling factor; the lower end of the interval when absent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to 1e-4 for Mackey-Glass and 1e-3 otherwise.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_WASHOUT)]
    pub washout: usize,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: usize,
    /// Save the trained model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results CSV, or a directory holding `results.csv`.
    #[arg(long)]
    pub results: PathBuf,
    /// Output directory; defaults to `ITUC_OUT_DIR`, then the results file's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Divergence { .. } | SeriesError::DegenerateRange { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotConverged { .. } | LinalgError::Singular { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<EspError> for CliError {
    fn from(e: EspError) -> Self {
        match e {
            EspError::Linalg(inner) => inner.into(),
            EspError::InvalidAlpha(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<EsnError> for CliError {
    fn from(e: EsnError) -> Self {
        match e {
            EsnError::Linalg(inner) => inner.into(),
            EsnError::Series(inner) => inner.into(),
            EsnError::Config(_) => CliError::Usage(e.to_string()),
            EsnError::DegenerateTarget => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Series(inner) => inner.into(),
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let mut text = e.render().to_string();
            if code != 0 && !text.contains("Usage:") {
                text.push('\n');
                text.push_str(&Cli::command().render_usage().to_string());
                text.push('\n');
            }
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Report(a) => cmd_report(a, out, err),
    }
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let path = match a.out {
        Some(p) => p,
        None => {
            let dir = default_out_dir();
            ensure_dir(&dir)?;
            dir.join(format!("{}.csv", a.benchmark.name()))
        }
    };
    let ts = a.benchmark.generate(a.n, a.seed)?;
    let meta = SeriesMeta {
        benchmark: a.benchmark.name().to_string(),
        dt: ts.dt(),
        seed: a.seed,
    };
    let mut buf = Vec::new();
    write_csv(&mut buf, &meta, &ts)?;
    write_file(&path, &buf)?;
    writeln!(out, "wrote {} samples x {} to {}", ts.len(), ts.dim(), path.display())?;
    Ok(())
}

/// Reads a dense matrix: one row per line, comma or whitespace separated.
/// Blank lines and `#` comments are skipped.
pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Data(format!("{} line {}: {e}", path.display(), idx + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no matrix rows", path.display())));
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(alpha) = a.alpha {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CliError::Usage(format!("--alpha must be positive, got {alpha}")));
        }
    }
    let w = match (&a.matrix, a.random) {
        (Some(path), _) => read_matrix(path)?,
        (None, Some(n)) => {
            if n == 0 {
                return Err(CliError::Usage("--random must be positive".into()));
            }
            let config = ReservoirConfig {
                seed: a.seed,
                ..ReservoirConfig::new(n, 1, 1)
            };
            init_model(&config)?.1
        }
        (None, None) => return Err(CliError::Usage("give --matrix or --random".into())),
    };
    if !w.is_square() {
        return Err(CliError::Data(format!(
            "matrix is {}x{}, not square",
            w.rows(),
            w.cols()
        )));
    }
    let b = compute_bounds(&w)?;
    print_bounds(out, &b)?;
    if let Some(alpha) = a.alpha {
        writeln!(out, "alpha    {alpha}")?;
        writeln!(out, "regime   {}", classify_alpha(&b, alpha))?;
    }
    Ok(())
}

fn print_bounds(out: &mut dyn Write, b: &SpectralBounds) -> std::io::Result<()> {
    writeln!(out, "eta      {}", b.eta)?;
    writeln!(out, "rho      {}", b.rho)?;
    writeln!(out, "u_low    {}", b.u_low)?;
    writeln!(out, "u_high   {}", b.u_high)?;
    writeln!(out, "ratio    {}", b.eta / b.rho)
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let gamma = a.gamma.unwrap_or(match a.benchmark {
        Benchmark::MackeyGlass => 1e-4,
        _ => 1e-3,
    });
    let mut plan = SweepPlan {
        sizes: vec![a.size],
        gamma,
        washout: a.washout,
        horizon: a.horizon,
        base_seed: a.seed,
        n_train: a.n_train,
        n_test: a.n_test,
        ..SweepPlan::protocol_default(a.benchmark)
    };
    plan.k_alphas = 2;
    plan.n_trials = 1;
    plan.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let data = SweepData::prepare(&plan)?;

    let dim = a.benchmark.dim();
    let config = ReservoirConfig {
        gamma,
        washout: a.washout,
        seed: a.seed,
        ..ReservoirConfig::new(a.size, dim, dim)
    };
    let (base, w_r_initial) = init_model(&config)?;
    let bounds = compute_bounds(&w_r_initial)?;
    let alpha = a.alpha.unwrap_or(bounds.u_low);
    let mut model = base.with_alpha(alpha)?;
    let scores = train_and_score(&mut model, &data, Some(a.horizon), DEFAULT_MMDS_WINDOW)?;

    print_bounds(out, &bounds)?;
    writeln!(out, "alpha    {alpha}")?;
    writeln!(out, "regime   {}", classify_alpha(&bounds, alpha))?;
    writeln!(out, "nrmse_teacher_forced {}", scores.teacher_forced)?;
    if let Some(v) = scores.free_run {
        writeln!(out, "nrmse_free_run_{} {v}", a.horizon)?;
    }
    match &scores.mmds {
        Ok(v) => writeln!(out, "mmds     {v}")?,
        Err(e) => writeln!(out, "mmds     NaN ({e})")?,
    }
    if let Some(path) = &a.model_out {
        model.save(path)?;
        writeln!(out, "saved model to {}", path.display())?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.workers == 0 {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    let plan = SweepPlan::load(&a.plan).map_err(|e| match e {
        ExperimentError::Io(io) => CliError::Data(format!("{}: {io}", a.plan.display())),
        other => CliError::Data(format!("{}: {other}", a.plan.display())),
    })?;
    let dir = a.out.unwrap_or_else(default_out_dir);
    ensure_dir(&dir)?;
    let data = SweepData::prepare(&plan)?;
    let records = run_sweep(&plan, &data, a.workers)?;
    let surfaces = aggregate(&records)?;
    write_file(&dir.join(RESULTS_FILE), write_results(&records).as_bytes())?;
    write_file(&dir.join(SURFACE_FILE), surface_csv(&surfaces).as_bytes())?;
    print_summary(out, &records, &surfaces)?;
    writeln!(out, "wrote {} and {} in {}", RESULTS_FILE, SURFACE_FILE, dir.display())?;
    Ok(())
}

fn print_summary(out: &mut dyn Write, records: &[SweepRecord], surfaces: &Surfaces) -> std::io::Result<()> {
    let valid = records.iter().filter(|r| r.status == TrialStatus::Ok).count();
    writeln!(
        out,
        "{}: {} trials, {} ok, {} failed",
        surfaces.benchmark,
        records.len(),
        valid,
        records.len() - valid
    )?;
    for &n_s in &surfaces.nrmse.sizes {
        let row = surfaces.nrmse.row(n_s).unwrap_or(&[]);
        let best = row
            .iter()
            .filter_map(|c| c.mean.map(|m| (c.alpha_index, m)))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((idx, m)) => writeln!(out, "  n_s={n_s}: best alpha_index {idx}, mean nrmse {m}")?,
            None => writeln!(out, "  n_s={n_s}: no valid trials")?,
        }
    }
    Ok(())
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let path = if a.results.is_dir() {
        a.results.join(RESULTS_FILE)
    } else {
        a.results.clone()
    };
    let file = std::fs::File::open(&path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let records = read_results(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let surfaces = aggregate(&records)?;
    let dir = match a.out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)) {
        Some(d) => d,
        None => match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        },
    };
    ensure_dir(&dir)?;
    write_file(&dir.join(SURFACE_FILE), surface_csv(&surfaces).as_bytes())?;
    write_file(&dir.join(NRMSE_MATRIX_FILE), surface_matrix(&surfaces.nrmse).as_bytes())?;
    write_file(&dir.join(MMDS_MATRIX_FILE), surface_matrix(&surfaces.mmds).as_bytes())?;
    let missing = surfaces.nrmse.missing_cells();
    if missing > 0 {
        writeln!(err, "warning: {missing} surface cells have no valid trials")?;
    }
    print_summary(out, &records, &surfaces)?;
    writeln!(
        out,
        "wrote {}, {} and {} in {}",
        SURFACE_FILE,
        NRMSE_MATRIX_FILE,
        MMDS_MATRIX_FILE,
        dir.display()
    )?;
    Ok(())
}

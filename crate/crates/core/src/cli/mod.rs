//! The `stanforge` command line.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies flag
//! overrides, writes the resulting effective config to
//! `<out>/<run-name>/effective_config.json` and then runs. Passing that file
//! back through `--config` reproduces the run. Run directories are named from
//! the subcommand and seed, never from the clock.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime or
//! numeric failure.

mod commands;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::data::SplitMode;
use crate::error::Error;
use crate::model::ModelKind;

pub use commands::{
    run_gradcheck, BenchmarkConfig, FixturesConfig, GradcheckConfig, GradcheckReport, GroupCheck, SimulateConfig, SimulateLayout,
    TrainRunConfig, TrainSummary, GRADCHECK_GROUPS,
};

/// Output root when neither `--out` nor `STANFORGE_OUT` is set.
pub const DEFAULT_OUT: &str = "runs";
pub const EFFECTIVE_CONFIG: &str = "effective_config.json";

#[derive(Debug, Parser)]
#[command(name = "stanforge", version, about = "STAN forecasting toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config for the subcommand; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output root directory.
    #[arg(long, global = true, env = "STANFORGE_OUT")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for the benchmark matrix (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an LSTAR series.
    Simulate(SimulateArgs),
    /// Train one model on a PJM-layout CSV.
    Train(TrainArgs),
    /// Finite-difference check of the STAN gradients.
    Gradcheck(GradcheckArgs),
    /// Run the model × dataset × horizon matrix and write reports.
    Benchmark(BenchmarkArgs),
    /// Write deterministic synthetic PJM-layout CSVs.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Comma-separated AR coefficients.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Option<Vec<f64>>,
    /// Comma-separated regime-shift coefficients.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub delay: Option<usize>,
    /// Noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Write `Datetime,<NAME>_MW` instead of `t,y`.
    #[arg(long)]
    pub pjm: bool,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// PJM-layout CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Value column; defaults to the first `*_MW` column.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub units: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub split: Option<SplitMode>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Keep only the most recent values of the series.
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[arg(long)]
    pub lookback: Option<usize>,
    #[arg(long)]
    pub units: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Rows in the probe batch.
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Double the analytic gradient of one group: W, b, phi, theta, gamma, c or head.
    #[arg(long)]
    pub corrupt: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// PJM-layout CSVs; repeat for several regions.
    #[arg(long)]
    pub data: Vec<PathBuf>,
    /// Comma-separated forecast horizons.
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<usize>>,
    #[arg(long)]
    pub units: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Only these model families (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub model: Option<Vec<ModelKind>>,
    #[arg(long)]
    pub split: Option<SplitMode>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Small widths, few epochs and short series for CPU runs.
    #[arg(long)]
    pub desk_scale: bool,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Comma-separated region names.
    #[arg(long, value_delimiter = ',')]
    pub regions: Option<Vec<String>>,
    /// Hours per region.
    #[arg(long)]
    pub n: Option<usize>,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (exit {})", self.message, self.code)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::MissingColumn { .. } | Error::Json(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub(crate) fn run_dir(cli: &Cli, name: &str) -> CliResult<PathBuf> {
    let root = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let dir = root.join(name);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => commands::simulate(cli, a),
        Command::Train(a) => commands::train(cli, a),
        Command::Gradcheck(a) => commands::gradcheck(cli, a),
        Command::Benchmark(a) => commands::benchmark(cli, a),
        Command::Fixtures(a) => commands::fixtures(cli, a),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

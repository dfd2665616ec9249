use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    load_config, run_dir, write_json, BenchmarkArgs, Cli, CliError, CliResult, FixturesArgs, GradcheckArgs,
    SimulateArgs, TrainArgs, EFFECTIVE_CONFIG,
};
use crate::bench::{aggregate, fit_and_score, run_benchmark, write_all_reports, BenchmarkPlan, DatasetSource, ModelSpec};
use crate::checkpoint::parameter_count;
use crate::data::{load_pjm_csv, lookback_for, prepare_run, SplitConfig, TimeSeries, DATETIME_HEADER};
use crate::error::Error;
use crate::fixtures::{write_fixtures, DEFAULT_REGIONS};
use crate::model::{Model, ModelKind};
use crate::numerics::{finite_diff_check, Matrix};
use crate::rng::{rng_for, Stream};
use crate::stan::{init_network, NetworkSpec, StanNetwork};
use crate::star::{simulate_lstar, LstarParams};
use crate::training::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimulateLayout {
    /// `t,y`
    #[default]
    Plain,
    /// `Datetime,<NAME>_MW` with hourly timestamps.
    Pjm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    pub params: LstarParams,
    pub n: usize,
    pub burn_in: usize,
    pub layout: SimulateLayout,
    pub name: String,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            params: LstarParams {
                phi0: 0.0,
                phi: vec![0.9],
                theta: vec![-1.4],
                gamma: 20.0,
                c: 0.0,
                delay: 1,
                sigma: 0.05,
            },
            n: 1000,
            burn_in: 200,
            layout: SimulateLayout::Plain,
            name: "SIM".into(),
            seed: 0,
        }
    }
}

pub fn simulate(cli: &Cli, a: &SimulateArgs) -> CliResult<()> {
    let mut cfg: SimulateConfig = load_config(cli.config.as_deref())?;
    let p = &mut cfg.params;
    override_opt(&mut p.phi0, a.phi0);
    override_opt(&mut p.phi, a.phi.clone());
    override_opt(&mut p.theta, a.theta.clone());
    override_opt(&mut p.gamma, a.gamma);
    override_opt(&mut p.c, a.c);
    override_opt(&mut p.delay, a.delay);
    override_opt(&mut p.sigma, a.sigma);
    override_opt(&mut cfg.n, a.n);
    override_opt(&mut cfg.burn_in, a.burn_in);
    override_opt(&mut cfg.name, a.name.clone());
    override_opt(&mut cfg.seed, cli.seed);
    if a.pjm {
        cfg.layout = SimulateLayout::Pjm;
    }
    cfg.params.validate()?;

    let dir = run_dir(cli, &format!("simulate-seed{}", cfg.seed))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), &cfg)?;
    let values = simulate_lstar(&cfg.params, cfg.n, cfg.burn_in, cfg.seed)?;
    let path = dir.join("series.csv");
    match cfg.layout {
        SimulateLayout::Plain => write_plain_csv(&path, &values)?,
        SimulateLayout::Pjm => TimeSeries::hourly(cfg.name.clone(), values).write_pjm_csv(&path)?,
    }
    write_json(&dir.join("params.json"), &cfg.params)?;
    println!("{}", path.display());
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainRunConfig {
    pub data: Option<PathBuf>,
    pub column: Option<String>,
    pub model: ModelKind,
    pub units: usize,
    pub depth: usize,
    pub horizon: usize,
    pub split: SplitConfig,
    pub train: TrainConfig,
    pub max_series_len: Option<usize>,
    pub seed: u64,
}

impl Default for TrainRunConfig {
    fn default() -> Self {
        Self {
            data: None,
            column: None,
            model: ModelKind::Stan,
            units: 64,
            depth: 3,
            horizon: 1,
            split: SplitConfig::default(),
            train: TrainConfig::default(),
            max_series_len: None,
            seed: 0,
        }
    }
}

impl TrainRunConfig {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            kind: self.model,
            units: self.units,
            depth: self.depth,
        }
    }
}

/// `summary.json` written by `train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub model: String,
    pub dataset: String,
    pub lookback: usize,
    pub horizon: usize,
    pub test_rmse: f64,
    pub epochs: usize,
    pub best_epoch: Option<usize>,
    pub parameter_count: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
}

pub fn train(cli: &Cli, a: &TrainArgs) -> CliResult<()> {
    let mut cfg: TrainRunConfig = load_config(cli.config.as_deref())?;
    if a.data.is_some() {
        cfg.data = a.data.clone();
    }
    if a.column.is_some() {
        cfg.column = a.column.clone();
    }
    override_opt(&mut cfg.model, a.model);
    override_opt(&mut cfg.units, a.units);
    override_opt(&mut cfg.depth, a.depth);
    override_opt(&mut cfg.horizon, a.horizon);
    override_opt(&mut cfg.split.mode, a.split);
    override_opt(&mut cfg.train.max_epochs, a.epochs);
    override_opt(&mut cfg.train.batch_size, a.batch_size);
    override_opt(&mut cfg.train.lr_initial, a.lr);
    if a.max_len.is_some() {
        cfg.max_series_len = a.max_len;
    }
    override_opt(&mut cfg.seed, cli.seed);
    cfg.train.seed = cfg.seed;

    let data_path = cfg
        .data
        .clone()
        .ok_or_else(|| CliError::usage("train needs --data <csv> or `data` in the config"))?;
    if cfg.horizon == 0 {
        return Err(CliError::usage("--horizon must be >= 1"));
    }
    let spec = cfg.spec();
    if matches!(spec.kind, ModelKind::Stan | ModelKind::Mlp) && (spec.units == 0 || spec.depth == 0) {
        return Err(CliError::usage("--units and --depth must be >= 1"));
    }
    cfg.train.validate()?;
    let column = match &cfg.column {
        Some(c) => c.clone(),
        None => detect_value_column(&data_path)?,
    };
    cfg.column = Some(column.clone());
    let (series, _) = load_pjm_csv(&data_path, &column)?;
    let values = truncate(series.values, cfg.max_series_len);
    let q = lookback_for(cfg.horizon);
    let data = prepare_run(&values, q, cfg.horizon, &cfg.split, cfg.seed)?;

    let dir = run_dir(cli, &format!("train-{}-seed{}", cfg.model.as_str(), cfg.seed))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), &cfg)?;
    let fit = fit_and_score(&spec, &data, &cfg.train, cfg.seed)?;
    fit.model.to_checkpoint(Some(data.scaler)).save(&dir.join("checkpoint.json"))?;
    if let Some(h) = &fit.history {
        h.save_csv(&dir.join("history.csv"))?;
    }
    let summary = TrainSummary {
        model: spec.name(),
        dataset: series.name,
        lookback: q,
        horizon: cfg.horizon,
        test_rmse: fit.test_rmse,
        epochs: fit.epochs,
        best_epoch: fit.history.as_ref().and_then(|h| h.best()).map(|(e, _)| e),
        parameter_count: fit.model.num_parameters(),
        n_train: data.train.len(),
        n_val: data.val.len(),
        n_test: data.test.len(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    println!(
        "{} on {}: test RMSE {:.6} after {} epochs ({} parameters)",
        summary.model, summary.dataset, summary.test_rmse, summary.epochs, summary.parameter_count
    );
    Ok(())
}

/// Parameter groups reported by `gradcheck`, in order.
pub const GRADCHECK_GROUPS: [&str; 7] = ["W", "b", "phi", "theta", "gamma", "c", "final projection"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GradcheckConfig {
    pub lookback: usize,
    pub units: usize,
    pub depth: usize,
    pub horizon: usize,
    pub batch: usize,
    pub eps: f64,
    pub tolerance: f64,
    pub corrupt: Option<String>,
    pub seed: u64,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        Self {
            lookback: 5,
            units: 4,
            depth: 3,
            horizon: 2,
            batch: 6,
            eps: 1e-5,
            tolerance: 1e-5,
            corrupt: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCheck {
    pub group: String,
    pub max_relative_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub groups: Vec<GroupCheck>,
    pub pass: bool,
}

fn group_of(tensor: &str) -> &str {
    if tensor.starts_with("head.") {
        "final projection"
    } else {
        tensor.rsplit('.').next().unwrap_or(tensor)
    }
}

fn corrupt_group(name: &str) -> CliResult<&'static str> {
    match name {
        "head" | "projection" | "final" | "final projection" => Ok("final projection"),
        other => GRADCHECK_GROUPS
            .iter()
            .find(|g| **g == other)
            .copied()
            .ok_or_else(|| CliError::usage(format!("unknown gradient group `{other}`"))),
    }
}

/// A seeded network with every parameter group moved off its initial value,
/// so that each group has a non-trivial gradient.
fn probe_network(cfg: &GradcheckConfig) -> crate::Result<(StanNetwork, Matrix, Matrix)> {
    let spec = NetworkSpec::new(cfg.lookback, cfg.units, cfg.depth, cfg.horizon)?;
    let mut net = init_network(spec, cfg.seed)?;
    let mut rng = rng_for(cfg.seed, Stream::Fixture);
    for t in net.params_mut().tensors_mut() {
        let group = group_of(&t.name).to_string();
        for v in t.value.as_mut_slice() {
            *v = match group.as_str() {
                "b" => rng.random_range(-0.5..0.5),
                "phi" => rng.random_range(0.5..1.5),
                "theta" => rng.random_range(-1.0..1.0),
                "gamma" => rng.random_range(0.5..2.0),
                "c" => rng.random_range(-0.5..0.5),
                _ => *v,
            };
        }
    }
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, rows, cols| {
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect())
    };
    let x = draw(&mut rng, cfg.batch, cfg.lookback)?;
    let y = draw(&mut rng, cfg.batch, cfg.horizon)?;
    Ok((net, x, y))
}

/// Runs the finite-difference check behind the `gradcheck` subcommand.
pub fn run_gradcheck(cfg: &GradcheckConfig) -> CliResult<GradcheckReport> {
    let corrupt = cfg.corrupt.as_deref().map(corrupt_group).transpose()?;
    if cfg.batch == 0 || !(cfg.eps > 0.0) {
        return Err(CliError::usage("gradcheck needs batch >= 1 and eps > 0"));
    }
    let (net, x, y) = probe_network(cfg)?;
    let loss_fn = |p: &crate::numerics::ParamStore| {
        let mut n = net.clone();
        *n.params_mut() = p.clone();
        let (loss, mut g) = n.loss_and_grad(&x, &y)?;
        if let Some(bad) = corrupt {
            for t in g.tensors_mut() {
                if group_of(&t.name) == bad {
                    t.value.as_mut_slice().iter_mut().for_each(|v| *v *= 2.0);
                }
            }
        }
        Ok((loss, g))
    };
    let report = finite_diff_check(loss_fn, net.params(), cfg.eps)?;
    let groups: Vec<GroupCheck> = GRADCHECK_GROUPS
        .iter()
        .map(|g| {
            let err = report.max_where(|name| group_of(name) == *g);
            GroupCheck {
                group: g.to_string(),
                max_relative_error: err,
                pass: err < cfg.tolerance,
            }
        })
        .collect();
    let pass = groups.iter().all(|g| g.pass);
    Ok(GradcheckReport { groups, pass })
}

pub fn gradcheck(cli: &Cli, a: &GradcheckArgs) -> CliResult<()> {
    let mut cfg: GradcheckConfig = load_config(cli.config.as_deref())?;
    override_opt(&mut cfg.lookback, a.lookback);
    override_opt(&mut cfg.units, a.units);
    override_opt(&mut cfg.depth, a.depth);
    override_opt(&mut cfg.horizon, a.horizon);
    override_opt(&mut cfg.batch, a.batch);
    override_opt(&mut cfg.eps, a.eps);
    if a.corrupt.is_some() {
        cfg.corrupt = a.corrupt.clone();
    }
    override_opt(&mut cfg.seed, cli.seed);
    let dir = run_dir(cli, &format!("gradcheck-seed{}", cfg.seed))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), &cfg)?;
    let report = run_gradcheck(&cfg)?;
    for g in &report.groups {
        println!(
            "{:<17} {:.3e}  {}",
            g.group,
            g.max_relative_error,
            if g.pass { "ok" } else { "FAIL" }
        );
    }
    write_json(&dir.join("gradcheck.json"), &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError {
            code: 2,
            message: format!("gradient check exceeded tolerance {:e}", cfg.tolerance),
        })
    }
}

/// Effective benchmark config: the plan plus the lookback used per horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    #[serde(flatten)]
    pub plan: BenchmarkPlan,
    /// Derived from `horizons`; ignored on input.
    #[serde(default, skip_deserializing)]
    pub lookbacks: Vec<usize>,
}

pub fn benchmark(cli: &Cli, a: &BenchmarkArgs) -> CliResult<()> {
    let base: Option<BenchmarkConfig> = load_config(cli.config.as_deref())?;
    let datasets = a
        .data
        .iter()
        .map(|p| dataset_from_path(p))
        .collect::<CliResult<Vec<_>>>()?;
    let horizons = a.horizons.clone();
    let mut plan = match base {
        Some(c) => c.plan,
        None if a.desk_scale => BenchmarkPlan::desk_scale(Vec::new(), vec![1, 6, 12], 0),
        None => BenchmarkPlan {
            datasets: Vec::new(),
            horizons: vec![1, 6, 12],
            models: BenchmarkPlan::standard_models(64, 3),
            runs: 5,
            base_seed: 0,
            train: TrainConfig::default(),
            split: SplitConfig::default(),
            max_series_len: None,
            blank_columns: vec!["GRU-300-3".into(), "LSTM-300-3".into()],
        },
    };
    if cli.config.is_some() && a.desk_scale {
        let desk = BenchmarkPlan::desk_scale(Vec::new(), Vec::new(), 0);
        plan.models = desk.models;
        plan.train.max_epochs = desk.train.max_epochs;
        plan.max_series_len = desk.max_series_len;
    }
    if !datasets.is_empty() {
        plan.datasets = datasets;
    }
    override_opt(&mut plan.horizons, horizons);
    override_opt(&mut plan.runs, a.runs);
    override_opt(&mut plan.base_seed, cli.seed);
    override_opt(&mut plan.split.mode, a.split);
    override_opt(&mut plan.train.max_epochs, a.epochs);
    if a.max_len.is_some() {
        plan.max_series_len = a.max_len;
    }
    if a.units.is_some() || a.depth.is_some() {
        for m in &mut plan.models {
            if matches!(m.kind, ModelKind::Stan | ModelKind::Mlp) {
                override_opt(&mut m.units, a.units);
                override_opt(&mut m.depth, a.depth);
            }
        }
    }
    if let Some(kinds) = &a.model {
        plan.models.retain(|m| kinds.contains(&m.kind));
    }
    if plan.datasets.is_empty() {
        return Err(CliError::usage("benchmark needs at least one --data <csv> or `datasets` in the config"));
    }
    plan.validate()?;
    let cfg = BenchmarkConfig {
        lookbacks: plan.lookbacks(),
        plan,
    };
    let dir = run_dir(cli, &format!("benchmark-seed{}", cfg.plan.base_seed))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), &cfg)?;

    let results = run_benchmark(&cfg.plan, cli.jobs)?;
    let report = aggregate(&results).with_blank_columns(&cfg.plan.blank_columns);
    if results.iter().all(|r| r.test_rmse.is_none()) {
        return Err(CliError {
            code: 2,
            message: "every benchmark cell failed".into(),
        });
    }
    write_all_reports(&report, &results, &dir)?;
    print!("{}", report.to_markdown());
    for m in cfg.plan.models.iter() {
        for &h in &cfg.plan.horizons {
            log::info!("{}: {} parameters at horizon {h}", m.name(), parameter_count(m.kind, &m.arch(h)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixturesConfig {
    pub regions: Vec<String>,
    pub n: usize,
    pub seed: u64,
}

impl Default for FixturesConfig {
    fn default() -> Self {
        Self {
            regions: DEFAULT_REGIONS.iter().map(|s| s.to_string()).collect(),
            n: 2000,
            seed: 0,
        }
    }
}

pub fn fixtures(cli: &Cli, a: &FixturesArgs) -> CliResult<()> {
    let mut cfg: FixturesConfig = load_config(cli.config.as_deref())?;
    override_opt(&mut cfg.regions, a.regions.clone());
    override_opt(&mut cfg.n, a.n);
    override_opt(&mut cfg.seed, cli.seed);
    if cfg.n == 0 {
        return Err(CliError::usage("--n must be >= 1"));
    }
    let dir = run_dir(cli, &format!("fixtures-seed{}", cfg.seed))?;
    write_json(&dir.join(EFFECTIVE_CONFIG), &cfg)?;
    for p in write_fixtures(&dir, &cfg.regions, cfg.n, cfg.seed)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn write_plain_csv(path: &Path, values: &[f64]) -> crate::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "y"])?;
    for (t, y) in values.iter().enumerate() {
        w.write_record([t.to_string(), y.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn override_opt<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn truncate(mut values: Vec<f64>, max: Option<usize>) -> Vec<f64> {
    if let Some(max) = max {
        if values.len() > max {
            values.drain(..values.len() - max);
        }
    }
    values
}

/// First `*_MW` column of a PJM-layout file, else the first non-timestamp one.
fn detect_value_column(path: &Path) -> crate::Result<String> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    headers
        .iter()
        .find(|h| h.ends_with("_MW"))
        .or_else(|| headers.iter().find(|h| h.as_str() != DATETIME_HEADER))
        .cloned()
        .ok_or_else(|| Error::MissingColumn {
            column: "*_MW".into(),
            available: headers.clone(),
        })
}

fn dataset_from_path(path: &Path) -> CliResult<DatasetSource> {
    let column = detect_value_column(path)?;
    Ok(DatasetSource {
        name: column.strip_suffix("_MW").unwrap_or(&column).to_string(),
        path: path.to_path_buf(),
        column,
    })
}

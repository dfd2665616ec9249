use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{BenchmarkPlan, ModelSpec};
use crate::baselines::{build_linear_nn, build_mlp, fit_linear_regression, LinearSpec, MlpSpec};
use crate::checkpoint::{parameter_count, AnyModel};
use crate::data::{load_pjm_csv, prepare_run, PreparedData};
use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::numerics::Matrix;
use crate::stan::{init_network, NetworkSpec};
use crate::training::{train, TrainConfig, TrainHistory};

/// `sqrt(mean((y - ŷ)²))` over equal-length slices.
pub fn rmse(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::dim("rmse", format!("len {}", y.len()), format!("len {}", y_hat.len())));
    }
    if y.is_empty() {
        return Err(Error::Empty("rmse"));
    }
    let sse: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sse / y.len() as f64).sqrt())
}

/// RMSE over every (sample, step) pair of two prediction matrices.
pub fn rmse_matrix(y: &Matrix, y_hat: &Matrix) -> Result<f64> {
    if y.shape() != y_hat.shape() {
        return Err(Error::dim("rmse", y.shape_str(), y_hat.shape_str()));
    }
    rmse(y.as_slice(), y_hat.as_slice())
}

/// Outcome of one (dataset, horizon, model, run) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub model: String,
    pub dataset: String,
    pub horizon: usize,
    pub lookback: usize,
    pub run: usize,
    pub seed: u64,
    /// Standardized units; `None` when the cell failed.
    pub test_rmse: Option<f64>,
    pub epochs: usize,
    pub parameter_count: usize,
    pub error: Option<String>,
    /// Wall-clock training time. Not serialized, so `results.json` stays
    /// reproducible; it is reported in `results_time.csv`.
    #[serde(skip)]
    pub train_seconds: f64,
}

/// A single trained and scored model.
#[derive(Debug, Clone)]
pub struct FittedRun {
    pub model: AnyModel,
    pub history: Option<TrainHistory>,
    pub test_rmse: f64,
    pub epochs: usize,
    pub seconds: f64,
}

/// Builds, trains (or fits) and scores one model on prepared data.
///
/// Neural models train on the train split with early stopping on the
/// validation split; closed-form regression is fitted on train + validation.
pub fn fit_and_score(spec: &ModelSpec, data: &PreparedData, train_cfg: &TrainConfig, seed: u64) -> Result<FittedRun> {
    let q = data.train.lookback;
    let tau = data.train.horizon;
    let cfg = TrainConfig { seed, ..*train_cfg };
    let started = Instant::now();
    let (model, history) = match spec.kind {
        ModelKind::Stan => {
            let net = init_network(NetworkSpec::new(q, spec.units, spec.depth, tau)?, seed)?;
            let out = train(net, (&data.train).into(), (&data.val).into(), &cfg)?;
            (AnyModel::Stan(out.model), Some(out.history))
        }
        ModelKind::Mlp => {
            let mlp = build_mlp(
                MlpSpec {
                    lookback: q,
                    units: spec.units,
                    depth: spec.depth,
                    horizon: tau,
                },
                seed,
            )?;
            let out = train(mlp, (&data.train).into(), (&data.val).into(), &cfg)?;
            (AnyModel::Mlp(out.model), Some(out.history))
        }
        ModelKind::Linear => {
            let lin = build_linear_nn(LinearSpec { lookback: q, horizon: tau }, seed)?;
            let out = train(lin, (&data.train).into(), (&data.val).into(), &cfg)?;
            (AnyModel::Linear(out.model), Some(out.history))
        }
        ModelKind::Linreg => {
            let x = stack(&data.train.inputs, &data.val.inputs)?;
            let y = stack(&data.train.targets, &data.val.targets)?;
            (AnyModel::Linreg(fit_linear_regression(&x, &y)?), None)
        }
    };
    let seconds = started.elapsed().as_secs_f64();
    let pred = model.predict(&data.test.inputs)?;
    let test_rmse = rmse_matrix(&data.test.targets, &pred)?;
    let epochs = history.as_ref().map_or(0, TrainHistory::len);
    Ok(FittedRun {
        model,
        history,
        test_rmse,
        epochs,
        seconds,
    })
}

fn stack(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.cols() {
        return Err(Error::dim("stack", a.shape_str(), b.shape_str()));
    }
    let mut data = a.as_slice().to_vec();
    data.extend_from_slice(b.as_slice());
    Matrix::from_vec(a.rows() + b.rows(), a.cols(), data)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    dataset: usize,
    horizon: usize,
    model: usize,
    run: usize,
}

/// Runs every cell of the plan, optionally on a pool of `jobs` threads.
///
/// All datasets are loaded and the plan is validated before any training
/// starts. A failing cell yields a result with `test_rmse = None` and the
/// error message; it never aborts the matrix. Results come back sorted by
/// (dataset, horizon, model, run) in plan order, whatever order the cells
/// finished in.
pub fn run_benchmark(plan: &BenchmarkPlan, jobs: Option<usize>) -> Result<Vec<RunResult>> {
    plan.validate()?;
    let mut series = Vec::with_capacity(plan.datasets.len());
    for ds in &plan.datasets {
        let (s, _) = load_pjm_csv(&ds.path, &ds.column)?;
        let mut values = s.values;
        if let Some(max) = plan.max_series_len {
            if values.len() > max {
                values.drain(..values.len() - max);
            }
        }
        series.push(values);
    }

    let mut cells = Vec::new();
    for dataset in 0..plan.datasets.len() {
        for horizon in 0..plan.horizons.len() {
            for model in 0..plan.models.len() {
                for run in 0..plan.runs {
                    cells.push(Cell {
                        dataset,
                        horizon,
                        model,
                        run,
                    });
                }
            }
        }
    }

    let exec = || -> Vec<RunResult> {
        cells
            .par_iter()
            .map(|c| run_cell(plan, &series[c.dataset], c))
            .collect()
    };
    let results = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?
            .install(exec),
        None => exec(),
    };
    if results.iter().all(|r| r.test_rmse.is_none()) {
        log::error!("every benchmark cell failed");
    }
    Ok(results)
}

fn run_cell(plan: &BenchmarkPlan, values: &[f64], cell: &Cell) -> RunResult {
    let spec = &plan.models[cell.model];
    let horizon = plan.horizons[cell.horizon];
    let arch = spec.arch(horizon);
    let seed = plan.base_seed + cell.run as u64;
    let mut result = RunResult {
        model: spec.name(),
        dataset: plan.datasets[cell.dataset].name.clone(),
        horizon,
        lookback: arch.lookback,
        run: cell.run,
        seed,
        test_rmse: None,
        epochs: 0,
        parameter_count: parameter_count(spec.kind, &arch),
        error: None,
        train_seconds: 0.0,
    };
    let outcome = prepare_run(values, arch.lookback, horizon, &plan.split, seed)
        .and_then(|data| fit_and_score(spec, &data, &plan.train, seed));
    match outcome {
        Ok(fit) => {
            debug_assert_eq!(fit.model.num_parameters(), result.parameter_count);
            result.test_rmse = Some(fit.test_rmse);
            result.epochs = fit.epochs;
            result.train_seconds = fit.seconds;
            log::info!(
                "{} {} h={} run {}: rmse {:.4} ({} epochs)",
                result.dataset,
                result.model,
                horizon,
                cell.run,
                fit.test_rmse,
                fit.epochs
            );
        }
        Err(e) => {
            log::warn!("{} {} h={} run {} failed: {e}", result.dataset, result.model, horizon, cell.run);
            result.error = Some(e.to_string());
        }
    }
    result
}

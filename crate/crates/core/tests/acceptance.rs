//! One PASS/FAIL line per acceptance criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Exits non-zero if an evaluated criterion fails. The real-data ordering
//! check needs a PJM CSV in `STANFORGE_PJM_CSV`; without one it reports
//! FAIL (not evaluated) and does not affect the exit status.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{loss_fn, normal, perturbed_network, rng};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use stanforge::baselines::{linear_parameter_count, mlp_parameter_count, LinearSpec, MlpSpec};
use stanforge::bench::{
    aggregate, fit_and_score, rmse, run_benchmark, write_all_reports, BenchmarkPlan, DatasetSource, ModelSpec, RESULTS_JSON,
};
use stanforge::fixtures::write_fixtures;
use stanforge::data::{fit_scaler, lookback_for, make_windows, prepare_run, split_runs, ScalerParams, SplitConfig};
use stanforge::numerics::{finite_diff_check, GradStore, Matrix, ParamStore};
use stanforge::stan::{count_parameters, transition_g, NetworkSpec};
use stanforge::star::{default_c_grid, estimate_lstar, simulate_lstar, LstarParams, DEFAULT_GAMMA_GRID};
use stanforge::training::{train, Samples, TrainConfig};
use stanforge::{Model, Result};

enum Outcome {
    Pass(String),
    Fail(String),
    NotEvaluated(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn gradients() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (q, d, l, tau) in [(5, 4, 3, 2), (10, 8, 4, 3)] {
        let net = perturbed_network(q, d, l, tau, 7);
        let x = normal(&mut rng(1), 8, q);
        let y = normal(&mut rng(2), 8, tau);
        let report = finite_diff_check(loss_fn(&net, &x, &y), net.params(), 1e-5)?;
        worst = worst.max(report.max_relative_error);
    }
    Ok(verdict(worst < 1e-5, format!("max relative error {worst:.2e} (tol 1e-5)")))
}

fn millions(n: usize) -> String {
    format!("{:.1}M", n as f64 / 1e6)
}

fn parameter_counts() -> Result<Outcome> {
    let horizons = [1, 6, 12];
    let stan = |l| -> Result<Vec<String>> {
        horizons
            .iter()
            .map(|&h| Ok(millions(count_parameters(&NetworkSpec::new(lookback_for(h), 3000, l, h)?))))
            .collect()
    };
    let mlp: Vec<String> = horizons
        .iter()
        .map(|&h| {
            millions(mlp_parameter_count(&MlpSpec {
                lookback: lookback_for(h),
                units: 3000,
                depth: 3,
                horizon: h,
            }))
        })
        .collect();
    let linear: Vec<usize> = horizons
        .iter()
        .map(|&h| linear_parameter_count(&LinearSpec { lookback: lookback_for(h), horizon: h }))
        .collect();
    let (s3, s4) = (stan(3)?, stan(4)?);
    let ok = s3 == ["18.2M", "18.2M", "18.3M"]
        && s4 == ["27.2M", "27.2M", "27.3M"]
        && mlp == ["18.1M", "18.2M", "18.2M"]
        && linear == [46, 276, 732];
    Ok(verdict(
        ok,
        format!("STAN-3000-3 {s3:?}, STAN-3000-4 {s4:?}, MLP-3000-3 {mlp:?}, Linear {linear:?}"),
    ))
}

fn lstar_round_trip() -> Result<Outcome> {
    // A zero intercept with zero noise leaves the path at 0 forever, so the
    // intercept is 0.2 to make the regression identifiable.
    let truth = LstarParams {
        phi0: 0.2,
        phi: vec![0.9],
        theta: vec![-1.4],
        gamma: 20.0,
        c: 0.0,
        delay: 1,
        sigma: 0.0,
    };
    let y = simulate_lstar(&truth, 1500, 0, 0)?;
    let mut c_grid = default_c_grid(&y);
    c_grid.push(0.0);
    let fit = estimate_lstar(&y, 1, 1, &DEFAULT_GAMMA_GRID, &c_grid)?;
    let p = &fit.params;
    let err = (p.phi0 - 0.2).abs().max((p.phi[0] - 0.9).abs()).max((p.theta[0] + 1.4).abs());
    Ok(verdict(
        err < 1e-6 && fit.sse < 1e-10 && p.gamma == 20.0 && p.c == 0.0,
        format!("coefficient error {err:.1e} (tol 1e-6), sse {:.1e} (tol 1e-10), gamma {} c {}", fit.sse, p.gamma, p.c),
    ))
}

fn nonlinear_advantage() -> Result<Outcome> {
    let params = LstarParams {
        phi0: 0.2,
        phi: vec![0.9],
        theta: vec![-1.8],
        gamma: 20.0,
        c: 0.2,
        delay: 1,
        sigma: 0.05,
    };
    let q = lookback_for(1);
    let (mut stan, mut lin) = (0.0, 0.0);
    for seed in 0..3 {
        let series = simulate_lstar(&params, 5000, 500, seed)?;
        let data = prepare_run(&series, q, 1, &SplitConfig::default(), seed)?;
        let cfg = TrainConfig::default();
        stan += fit_and_score(&ModelSpec::stan(64, 3), &data, &cfg, seed)?.test_rmse / 3.0;
        lin += fit_and_score(&ModelSpec::linreg(), &data, &cfg, seed)?.test_rmse / 3.0;
    }
    Ok(verdict(
        lin - stan >= 0.01,
        format!("STAN-64-3 {stan:.4} vs LinearRegression {lin:.4}, gap {:.4} (need >= 0.01)", lin - stan),
    ))
}

fn real_data_ordering() -> Result<Outcome> {
    let Some(path) = std::env::var_os("STANFORGE_PJM_CSV") else {
        return Ok(Outcome::NotEvaluated("no PJM data; set STANFORGE_PJM_CSV to a <REGION>_hourly.csv".into()));
    };
    let path = std::path::PathBuf::from(path);
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("REGION")
        .trim_end_matches("_hourly")
        .to_string();
    let plan = BenchmarkPlan {
        datasets: vec![DatasetSource {
            column: format!("{name}_MW"),
            name,
            path,
        }],
        horizons: vec![1],
        models: vec![ModelSpec::linreg(), ModelSpec::stan(128, 3), ModelSpec::mlp(128, 3)],
        runs: 3,
        base_seed: 0,
        train: TrainConfig::default(),
        split: SplitConfig::default(),
        max_series_len: std::env::var("STANFORGE_PJM_MAX_LEN").ok().and_then(|s| s.parse().ok()),
        blank_columns: Vec::new(),
    };
    let report = aggregate(&run_benchmark(&plan, None)?);
    let mean = |i: usize| report.rows[0].cells[i].as_ref().and_then(|c| c.mean).unwrap_or(f64::NAN);
    let (lr, stan, mlp) = (mean(0), mean(1), mean(2));
    Ok(verdict(
        stan < lr && stan <= mlp + 0.005,
        format!("STAN-128-3 {stan:.4}, LinearRegression {lr:.4}, MLP-128-3 {mlp:.4}"),
    ))
}

/// Predicts zeros and never learns, so the validation loss never moves.
#[derive(Clone)]
struct Frozen(ParamStore);

impl Model for Frozen {
    type Cache = ();

    fn forward(&self, x: &Matrix) -> Result<(Matrix, ())> {
        Ok((Matrix::zeros(x.rows(), 1), ()))
    }

    fn backward(&self, _: &(), _: &Matrix) -> Result<GradStore> {
        Ok(self.0.zeros_like())
    }

    fn params(&self) -> &ParamStore {
        &self.0
    }

    fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.0
    }
}

fn protocol_mechanics() -> Result<Outcome> {
    let mut params = ParamStore::new();
    params.push("k", Matrix::zeros(1, 1));
    let x = Matrix::filled(20, 3, 1.0);
    let y = Matrix::filled(20, 1, 0.5);
    let s = Samples { inputs: &x, targets: &y };
    let stopped = train(Frozen(params.clone()), s, s, &TrainConfig::default())?.history.len();

    let cfg = TrainConfig {
        es_patience: 100,
        max_epochs: 40,
        ..TrainConfig::default()
    };
    let mut lrs: Vec<f64> = Vec::new();
    for r in train(Frozen(params), s, s, &cfg)?.history.records {
        if lrs.last() != Some(&r.lr) {
            lrs.push(r.lr);
        }
    }
    Ok(verdict(
        stopped == 16 && lrs == [1e-3, 2.5e-4, 6.25e-5, 2.5e-5],
        format!("stopped after epoch {stopped}, lr sequence {lrs:?}"),
    ))
}

fn determinism() -> Result<Outcome> {
    let tmp = tempfile::tempdir().map_err(|e| stanforge::Error::Io { path: "tempdir".into(), source: e })?;
    let regions = ["AEP", "DAYTON", "PJME"];
    let paths = write_fixtures(&tmp.path().join("data"), &regions.map(String::from), 2000, 0)?;
    let datasets = paths
        .into_iter()
        .zip(regions)
        .map(|(path, name)| DatasetSource {
            name: name.into(),
            path,
            column: format!("{name}_MW"),
        })
        .collect();
    let plan = BenchmarkPlan::desk_scale(datasets, vec![1, 6, 12], 0);
    let mut outputs = Vec::new();
    for rerun in ["first", "second"] {
        let results = run_benchmark(&plan, None)?;
        let report = aggregate(&results).with_blank_columns(&plan.blank_columns);
        let out = tmp.path().join(rerun);
        write_all_reports(&report, &results, &out)?;
        let file = out.join(RESULTS_JSON);
        outputs.push(std::fs::read(&file).map_err(|e| stanforge::Error::Io { path: file.clone(), source: e })?);
    }
    let same = outputs[0] == outputs[1];
    Ok(verdict(
        same,
        format!("desk-scale plan on 3 synthetic regions, results.json {} bytes, byte-identical: {same}", outputs[0].len()),
    ))
}

fn invariants() -> Result<Outcome> {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let mut failures = Vec::new();
    let mut check = |name: &str, r: std::result::Result<(), String>| {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    };

    check(
        "gate range and monotonicity",
        runner
            .run(&(-1e3f64..1e3, 0.0f64..10.0, 0.01f64..100.0, -5.0f64..5.0), |(z, dz, gamma, c)| {
                let (g1, g2) = (transition_g(z, gamma, c), transition_g(z + dz, gamma, c));
                prop_assert!(g1 > 0.0 && g1 < 1.0);
                prop_assert!(g2 >= g1);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "affine linear-regime reduction",
        runner
            .run(&(0u64..1000, -2.0f64..2.0), |(seed, alpha)| {
                let mut net = perturbed_network(4, 3, 3, 2, seed);
                for t in net.params_mut().tensors_mut() {
                    if t.name.ends_with(".theta") {
                        t.value.as_mut_slice().iter_mut().for_each(|v| *v = 0.0);
                    }
                }
                let x = normal(&mut rng(seed), 1, 4);
                let scaled = Matrix::from_vec(1, 4, x.as_slice().iter().map(|v| alpha * v).collect()).unwrap();
                let f = |m: &Matrix| net.predict(m).unwrap().into_vec();
                let (fx, fs, f0) = (f(&x), f(&scaled), f(&Matrix::zeros(1, 4)));
                for k in 0..2 {
                    let want = alpha * fx[k] + (1.0 - alpha) * f0[k];
                    prop_assert!((fs[k] - want).abs() <= 1e-9 * (1.0 + want.abs()));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "window partition and alignment",
        runner
            .run(&(prop::collection::vec(-1e3f64..1e3, 30..200), 1usize..8, 1usize..4, any::<u64>()), |(v, q, tau, seed)| {
                let w = make_windows(&v, q, tau, &ScalerParams::IDENTITY).unwrap();
                prop_assert_eq!(w.len(), v.len() - q - tau + 1);
                for (i, &t) in w.anchors.iter().enumerate() {
                    prop_assert_eq!(w.inputs.row(i), &v[t - q..t]);
                    prop_assert_eq!(w.targets.row(i), &v[t..t + tau]);
                }
                let s = split_runs(w.len(), &SplitConfig::default(), seed).unwrap();
                let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..w.len()).collect::<Vec<_>>());
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "scaler round trip",
        runner
            .run(&prop::collection::vec(-1e4f64..1e4, 2..200), |v| {
                prop_assume!(v.iter().any(|x| *x != v[0]));
                let s = fit_scaler(&v).unwrap();
                for x in &v {
                    prop_assert!((s.invert(s.apply(*x)) - x).abs() <= 1e-12 * x.abs().max(1.0));
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    check(
        "rmse identities",
        runner
            .run(&prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..60), |pairs| {
                let (y, yh): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                let sse: f64 = y.iter().zip(&yh).map(|(a, b)| (a - b).powi(2)).sum();
                let r = rmse(&y, &yh).unwrap();
                prop_assert!((r * r * y.len() as f64 - sse).abs() <= 1e-9 * sse.max(1.0));
                prop_assert_eq!(rmse(&y, &y).unwrap(), 0.0);
                prop_assert_eq!(r, rmse(&yh, &y).unwrap());
                Ok(())
            })
            .map_err(|e| e.to_string()),
    );

    Ok(if failures.is_empty() {
        Outcome::Pass("gate, affine reduction, windows, scaler and rmse properties hold over 256 cases each".into())
    } else {
        Outcome::Fail(failures.join("; "))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 8] = [
        ("gradient correctness", gradients),
        ("parameter counts", parameter_counts),
        ("classical STAR round trip", lstar_round_trip),
        ("nonlinear advantage", nonlinear_advantage),
        ("ordering on real PJM data", real_data_ordering),
        ("protocol mechanics", protocol_mechanics),
        ("benchmark determinism", determinism),
        ("invariant suites", invariants),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Outcome::Pass(d) => println!("PASS {name}: {d} [{secs:.1}s]"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("FAIL {name}: {d} [{secs:.1}s]");
            }
            Outcome::NotEvaluated(d) => println!("FAIL {name}: not evaluated, {d}"),
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! STAN vs closed-form linear regression on a simulated LSTAR series.
//!
//! The generator switches regime sharply around zero, so a linear model is
//! misspecified and a STAN network should beat it on 1-step forecasts.
//!
//! ```text
//! cargo run --release --example nonlinear_advantage -- [units] [seeds]
//! ```

use stanforge::bench::{fit_and_score, ModelSpec};
use stanforge::data::{lookback_for, prepare_run, SplitConfig};
use stanforge::star::{simulate_lstar, LstarParams};
use stanforge::training::TrainConfig;

fn main() -> stanforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let units: usize = args.next().map_or(64, |s| s.parse().expect("units"));
    let seeds: u64 = args.next().map_or(3, |s| s.parse().expect("seeds"));

    let params = LstarParams {
        phi0: 0.2,
        phi: vec![0.9],
        theta: vec![-1.8],
        gamma: 20.0,
        c: 0.2,
        delay: 1,
        sigma: 0.05,
    };
    let horizon = 1;
    let q = lookback_for(horizon);
    let mut stan_sum = 0.0;
    let mut lin_sum = 0.0;
    for seed in 0..seeds {
        let series = simulate_lstar(&params, 5000, 500, seed)?;
        let data = prepare_run(&series, q, horizon, &SplitConfig::default(), seed)?;
        let cfg = TrainConfig::default();
        let stan = fit_and_score(&ModelSpec::stan(units, 3), &data, &cfg, seed)?;
        let lin = fit_and_score(&ModelSpec::linreg(), &data, &cfg, seed)?;
        println!(
            "seed {seed}: STAN-{units}-3 {:.4} ({} epochs, {:.1}s)  LinearRegression {:.4}",
            stan.test_rmse, stan.epochs, stan.seconds, lin.test_rmse
        );
        stan_sum += stan.test_rmse;
        lin_sum += lin.test_rmse;
    }
    let n = seeds as f64;
    println!(
        "mean: STAN {:.4}  LinearRegression {:.4}  gap {:.4}",
        stan_sum / n,
        lin_sum / n,
        lin_sum / n - stan_sum / n
    );
    Ok(())
}

//! Simulate a logistic smooth transition AR series and estimate it back.

use stanforge::star::{default_c_grid, estimate_lstar, simulate_lstar, LstarParams, DEFAULT_GAMMA_GRID};

pub fn run_example() -> stanforge::Result<()> {
    let truth = LstarParams {
        phi0: 0.2,
        phi: vec![0.9],
        theta: vec![-1.4],
        gamma: 20.0,
        c: 0.0,
        delay: 1,
        sigma: 0.0,
    };

    let clean = simulate_lstar(&truth, 1500, 0, 1)?;
    let mut c_grid = default_c_grid(&clean);
    c_grid.push(0.0);
    let fit = estimate_lstar(&clean, 1, 1, &DEFAULT_GAMMA_GRID, &c_grid)?;
    println!(
        "noiseless: gamma {} c {} phi0 {:.8} phi {:.8} theta {:.8} sse {:.2e}",
        fit.params.gamma, fit.params.c, fit.params.phi0, fit.params.phi[0], fit.params.theta[0], fit.sse
    );

    let noisy = LstarParams {
        phi0: 0.0,
        sigma: 0.1,
        ..truth
    };
    let series = simulate_lstar(&noisy, 2000, 200, 0)?;
    let fit = estimate_lstar(&series, 1, 1, &DEFAULT_GAMMA_GRID, &default_c_grid(&series))?;
    println!(
        "sigma 0.1: gamma {} c {:.3} phi {:.3} theta {:.3} residual sd {:.3}",
        fit.params.gamma, fit.params.c, fit.params.phi[0], fit.params.theta[0], fit.params.sigma
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}

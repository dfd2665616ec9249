use stanforge::star::{default_c_grid, estimate_lstar, simulate_lstar, LstarParams, DEFAULT_GAMMA_GRID};
use stanforge::stan::transition_g;

fn truth(phi0: f64, sigma: f64) -> LstarParams {
    LstarParams {
        phi0,
        phi: vec![0.9],
        theta: vec![-1.4],
        gamma: 20.0,
        c: 0.0,
        delay: 1,
        sigma,
    }
}

#[test]
fn noiseless_round_trip_on_grid() {
    let t = truth(0.2, 0.0);
    let y = simulate_lstar(&t, 1500, 0, 0).unwrap();
    let mut c_grid = default_c_grid(&y);
    c_grid.push(0.0);
    let fit = estimate_lstar(&y, 1, 1, &DEFAULT_GAMMA_GRID, &c_grid).unwrap();
    assert!(fit.sse < 1e-10, "sse {:e}", fit.sse);
    assert_eq!((fit.params.gamma, fit.params.c), (20.0, 0.0));
    assert!((fit.params.phi0 - 0.2).abs() < 1e-6);
    assert!((fit.params.phi[0] - 0.9).abs() < 1e-6);
    assert!((fit.params.theta[0] + 1.4).abs() < 1e-6);
}

#[test]
fn noisy_recovery_within_tenth() {
    for seed in 0..4 {
        let y = simulate_lstar(&truth(0.0, 0.1), 2000, 200, seed).unwrap();
        let fit = estimate_lstar(&y, 1, 1, &DEFAULT_GAMMA_GRID, &default_c_grid(&y)).unwrap();
        assert!((fit.params.phi[0] - 0.9).abs() < 0.1, "seed {seed}: {:?}", fit.params);
        assert!((fit.params.theta[0] + 1.4).abs() < 0.1, "seed {seed}: {:?}", fit.params);
        assert!((fit.params.sigma - 0.1).abs() < 0.01, "seed {seed}: {:?}", fit.params);
    }
}

#[test]
fn superset_grid_never_does_worse() {
    let y = simulate_lstar(&truth(0.0, 0.1), 800, 100, 3).unwrap();
    let c = default_c_grid(&y);
    let coarse = estimate_lstar(&y, 1, 1, &[1.0, 10.0], &c[..5]).unwrap();
    let fine = estimate_lstar(&y, 1, 1, &DEFAULT_GAMMA_GRID, &c).unwrap();
    assert!(fine.sse <= coarse.sse);
}

#[test]
fn large_gamma_gate_is_binary_away_from_c() {
    for z in [-1.0, -0.01, -0.002, 0.002, 0.01, 1.0] {
        let g = transition_g(z, 1e4, 0.0);
        let want = if z > 0.0 { 1.0 } else { 0.0 };
        assert!((g - want).abs() < 1e-6, "z={z}: {g}");
    }
}

/// With gamma = 1e4 the simulated path tracks the two-regime threshold
/// recursion driven by the same shocks.
#[test]
fn large_gamma_dynamics_follow_threshold_model() {
    let sigma = 0.05;
    let seed = 5;
    let n = 3000;
    let shocks = simulate_lstar(
        &LstarParams {
            phi0: 0.0,
            phi: vec![0.0],
            theta: vec![0.0],
            sigma,
            ..truth(0.0, sigma)
        },
        n,
        0,
        seed,
    )
    .unwrap();
    let p = LstarParams {
        gamma: 1e4,
        ..truth(0.0, sigma)
    };
    let lstar = simulate_lstar(&p, n, 0, seed).unwrap();
    let mut prev = 0.0;
    let mut close = 0;
    for t in 0..n {
        let regime = if prev > p.c { p.theta[0] } else { 0.0 };
        let y = p.phi0 + (p.phi[0] + regime) * prev + shocks[t];
        if (y - lstar[t]).abs() < 1e-6 {
            close += 1;
        }
        prev = y;
    }
    assert!(close as f64 / n as f64 > 0.9, "{close} of {n} steps within 1e-6");
}

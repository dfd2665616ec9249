//! The logistic transition and a single STAN unit.

use stanforge::stan::{stan_unit_forward, transition_g};

pub fn run_example() -> stanforge::Result<()> {
    println!("G(z; gamma, c) for c = 0");
    for gamma in [0.5, 1.0, 5.0, 50.0] {
        let row: Vec<String> = [-2.0, -0.5, 0.0, 0.5, 2.0]
            .iter()
            .map(|&z| format!("{:.4}", transition_g(z, gamma, 0.0)))
            .collect();
        println!("  gamma {gamma:>5}: {}", row.join("  "));
    }

    // phi = 1, theta = 0 leaves the affine pre-activation untouched.
    for y in [-1.0, 0.0, 1.0] {
        let linear = stan_unit_forward(y, 1.0, 0.0, 1.0, 0.0);
        let shifted = stan_unit_forward(y, 1.0, 0.5, 1.0, 0.0);
        println!("unit({y:+.1}): theta=0 -> {linear:+.6}, theta=0.5 -> {shifted:+.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}

//! Closed-form parameter counts for the full-width architectures.
//!
//! STAN and MLP at width 3000, linear models over the raw lookback window,
//! for horizons 1, 6 and 12 (lookbacks 45, 45, 60).

use stanforge::baselines::{linear_parameter_count, mlp_parameter_count, LinearSpec, MlpSpec};
use stanforge::data::lookback_for;
use stanforge::stan::{count_parameters, NetworkSpec};

pub fn run_example() -> stanforge::Result<()> {
    let horizons = [1, 6, 12];
    println!("{:<14} {:>12} {:>12} {:>12}", "model", "h=1", "h=6", "h=12");
    for depth in [3, 4] {
        let counts = horizons
            .iter()
            .map(|&h| NetworkSpec::new(lookback_for(h), 3000, depth, h).map(|s| count_parameters(&s)))
            .collect::<stanforge::Result<Vec<_>>>()?;
        print_row(&format!("STAN-3000-{depth}"), &counts);
    }
    let mlp: Vec<usize> = horizons
        .iter()
        .map(|&h| {
            mlp_parameter_count(&MlpSpec {
                lookback: lookback_for(h),
                units: 3000,
                depth: 3,
                horizon: h,
            })
        })
        .collect();
    print_row("MLP-3000-3", &mlp);
    let linear: Vec<usize> = horizons
        .iter()
        .map(|&h| {
            linear_parameter_count(&LinearSpec {
                lookback: lookback_for(h),
                horizon: h,
            })
        })
        .collect();
    print_row("Linear", &linear);
    Ok(())
}

fn print_row(name: &str, counts: &[usize]) {
    let cells: Vec<String> = counts.iter().map(|&c| human(c)).collect();
    println!("{:<14} {:>12} {:>12} {:>12}", name, cells[0], cells[1], cells[2]);
}

fn human(n: usize) -> String {
    if n >= 100_000 {
        format!("{:.1}M", n as f64 / 1e6)
    } else {
        n.to_string()
    }
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}

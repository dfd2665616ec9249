//! Central finite differences against the hand-derived STAN backward pass.

use rand::Rng;
use rand_distr::StandardNormal;
use stanforge::numerics::{finite_diff_check, Matrix, ParamStore};
use stanforge::rng::{rng_for, Stream};
use stanforge::stan::{init_network, NetworkSpec};
use stanforge::Model;

pub fn run_example() -> stanforge::Result<()> {
    for (q, d, l, tau) in [(5, 4, 3, 2), (10, 8, 4, 3)] {
        let mut net = init_network(NetworkSpec::new(q, d, l, tau)?, 11)?;
        let mut rng = rng_for(11, Stream::Fixture);
        // Move theta off zero so the gate parameters receive gradient.
        for t in net.params_mut().tensors_mut() {
            if t.name.ends_with(".theta") {
                t.value.as_mut_slice().iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
            }
        }
        let mut draw = |rows, cols| {
            Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect())
        };
        let x = draw(8, q)?;
        let y = draw(8, tau)?;
        let report = finite_diff_check(
            |p: &ParamStore| {
                let mut n = net.clone();
                *n.params_mut() = p.clone();
                n.loss_and_grad(&x, &y)
            },
            net.params(),
            1e-5,
        )?;
        println!("q={q} d={d} L={l} tau={tau}: max relative error {:.2e}", report.max_relative_error);
        for t in &report.tensors {
            println!("  {:<14} {:.2e}", t.name, t.max_relative_error);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}

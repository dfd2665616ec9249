#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use stanforge::numerics::{Matrix, ParamStore};
use stanforge::rng::{rng_for, Stream};
use stanforge::stan::{init_network, NetworkSpec, StanNetwork};
use stanforge::Model;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed, Stream::Fixture)
}

pub fn normal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

/// A network with every gate parameter moved off its initial value.
pub fn perturbed_network(q: usize, d: usize, l: usize, tau: usize, seed: u64) -> StanNetwork {
    let mut net = init_network(NetworkSpec::new(q, d, l, tau).unwrap(), seed).unwrap();
    let mut r = rng(seed ^ 0xA5A5);
    for t in net.params_mut().tensors_mut() {
        let group = t.name.rsplit('.').next().unwrap().to_string();
        for v in t.value.as_mut_slice() {
            *v = match group.as_str() {
                "b" => r.random_range(-0.5..0.5),
                "phi" => r.random_range(0.5..1.5),
                "theta" => {
                    let m: f64 = r.random_range(0.2..1.0);
                    if r.random_bool(0.5) { m } else { -m }
                }
                "gamma" => r.random_range(0.5..2.0),
                "c" => r.random_range(-0.5..0.5),
                _ => *v,
            };
        }
    }
    net
}

/// Loss closure for [`stanforge::numerics::finite_diff_check`].
pub fn loss_fn<'a, M: Model>(
    model: &'a M,
    x: &'a Matrix,
    y: &'a Matrix,
) -> impl FnMut(&ParamStore) -> stanforge::Result<(f64, ParamStore)> + 'a {
    move |p| {
        let mut m = model.clone();
        *m.params_mut() = p.clone();
        m.loss_and_grad(x, y)
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

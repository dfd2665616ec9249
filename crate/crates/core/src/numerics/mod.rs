//! Dense linear algebra, the MSE objective, Adam and gradient checking.
//!
//! Everything runs in `f64`. Matrices are row-major; products above a small
//! size threshold split output rows across the rayon pool, which never changes
//! the summation order of any individual entry, so results are bit-identical
//! regardless of thread count.

mod adam;
mod gradcheck;
pub mod linalg;
mod matrix;
mod params;

pub use adam::{adam_step, Adam, AdamConfig, AdamState};
pub use gradcheck::{check_with_gradient, finite_diff_check, relative_error, GradCheckReport, TensorCheck};
pub use matrix::{affine_backward, affine_forward, dot, mse_loss, relu, relu_grad, AffineGrads, Matrix};
pub use params::{GradStore, ParamStore, Tensor};

use rand::Rng;

/// Glorot-uniform weights: entries uniform in `±sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.random_range(-limit..=limit)).collect();
    Matrix::from_vec(rows, cols, data).expect("length matches by construction")
}

//! Smooth transition autoregressive networks (STAN) for univariate
//! time-series forecasting, written from scratch in `f64`.
//!
//! - [`stan`]: the STAN layer, network, hand-derived backward pass and
//!   parameter accounting.
//! - [`baselines`]: closed-form linear regression, a linear network and a ReLU MLP.
//! - [`star`]: classical LSTAR simulation and grid-search estimation.
//! - [`data`]: PJM-layout CSV loading, standard scaling, lookback windows, splits.
//! - [`training`]: minibatch Adam with early stopping and plateau LR reduction.
//! - [`bench`]: RMSE, the benchmark matrix, aggregation and report files.
//! - [`numerics`]: matrices, affine maps, MSE, Adam, finite-difference checks.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod baselines;
pub mod bench;
pub mod checkpoint;
pub mod cli;
pub mod data;
mod error;
pub mod fixtures;
pub mod model;
pub mod numerics;
pub mod rng;
pub mod stan;
pub mod star;
pub mod training;

pub use error::{Error, Result};
pub use model::{Model, ModelKind};

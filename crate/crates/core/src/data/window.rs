use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::scaler::{fit_scaler, ScalerParams};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::rng::{rng_for, Stream};

/// Minimum lookback, in hours.
pub const MIN_LOOKBACK: usize = 45;

/// `max(45, 5·n_ahead)`.
pub fn lookback_for(n_ahead: usize) -> usize {
    MIN_LOOKBACK.max(5 * n_ahead)
}

/// Supervised windows over a single series.
///
/// Row `i` has anchor `t = anchors[i]`: its input is `values[t-q..t]` and its
/// target `values[t..t+τ]`, both standardized.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub inputs: Matrix,
    pub targets: Matrix,
    pub anchors: Vec<usize>,
    pub lookback: usize,
    pub horizon: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            inputs: self.inputs.select_rows(idx),
            targets: self.targets.select_rows(idx),
            anchors: idx.iter().map(|&i| self.anchors[i]).collect(),
            lookback: self.lookback,
            horizon: self.horizon,
        }
    }
}

/// Every anchor from `q` to `len - τ`, inclusive.
pub fn make_windows(values: &[f64], q: usize, tau: usize, scaler: &ScalerParams) -> Result<WindowedDataset> {
    if q == 0 || tau == 0 {
        return Err(Error::Config(format!("lookback and horizon must be >= 1 (got {q}, {tau})")));
    }
    if values.len() < q + tau {
        return Err(Error::SeriesTooShort {
            needed: q + tau,
            got: values.len(),
        });
    }
    let n = values.len() - q - tau + 1;
    let scaled = scaler.apply_all(values);
    let mut inputs = Vec::with_capacity(n * q);
    let mut targets = Vec::with_capacity(n * tau);
    let anchors: Vec<usize> = (q..q + n).collect();
    for &t in &anchors {
        inputs.extend_from_slice(&scaled[t - q..t]);
        targets.extend_from_slice(&scaled[t..t + tau]);
    }
    Ok(WindowedDataset {
        inputs: Matrix::from_vec(n, q, inputs)?,
        targets: Matrix::from_vec(n, tau, targets)?,
        anchors,
        lookback: q,
        horizon: tau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Shuffle windows, then cut.
    #[default]
    Random,
    /// Cut in time order: train, then validation, then test.
    Contiguous,
}

impl std::str::FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(SplitMode::Random),
            "contiguous" => Ok(SplitMode::Contiguous),
            other => Err(format!("unknown split `{other}` (expected random|contiguous)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_frac: f64,
    pub val_frac_of_train: f64,
    pub mode: SplitMode,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_frac: 0.8,
            val_frac_of_train: 0.2,
            mode: SplitMode::Random,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    /// Train followed by validation.
    pub fn train_pool(&self) -> impl Iterator<Item = usize> + '_ {
        self.train.iter().chain(&self.val).copied()
    }
}

/// Partitions `0..n` into train/validation/test.
///
/// The test set takes `ceil((1 - train_frac)·n)` rows; of the remaining pool,
/// the last `pool - floor(pool·(1 - val_frac))` rows (after shuffling, in
/// random mode) become validation.
pub fn split_runs(n: usize, config: &SplitConfig, seed: u64) -> Result<SplitIndices> {
    if !(config.train_frac > 0.0 && config.train_frac < 1.0)
        || !(config.val_frac_of_train > 0.0 && config.val_frac_of_train < 1.0)
    {
        return Err(Error::Config(format!("split fractions must lie in (0, 1): {config:?}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    if config.mode == SplitMode::Random {
        order.shuffle(&mut rng_for(seed, Stream::Split));
    }
    // Guard against 0.2·100 landing a hair above 20.
    let n_test = (((1.0 - config.train_frac) * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let pool = n - n_test.min(n);
    let n_train = ((pool as f64 * (1.0 - config.val_frac_of_train)) + 1e-9).floor() as usize;
    let test = order.split_off(pool);
    let val = order.split_off(n_train);
    let train = order;
    if train.is_empty() || val.is_empty() || test.is_empty() {
        return Err(Error::Config(format!(
            "split of {n} windows leaves an empty set ({} train / {} val / {} test)",
            train.len(),
            val.len(),
            test.len()
        )));
    }
    Ok(SplitIndices { train, val, test })
}

/// Standardized train/validation/test windows for one run.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: WindowedDataset,
    pub val: WindowedDataset,
    pub test: WindowedDataset,
    pub scaler: ScalerParams,
    pub split: SplitIndices,
}

/// Windows the raw series, splits, fits the scaler on the values covered by
/// train-pool inputs only, and standardizes every set with it.
pub fn prepare_run(values: &[f64], q: usize, tau: usize, split: &SplitConfig, seed: u64) -> Result<PreparedData> {
    let raw = make_windows(values, q, tau, &ScalerParams::IDENTITY)?;
    let idx = split_runs(raw.len(), split, seed)?;
    let mut covered = vec![false; values.len()];
    for i in idx.train_pool() {
        let t = raw.anchors[i];
        covered[t - q..t].iter_mut().for_each(|c| *c = true);
    }
    let fit_values: Vec<f64> = values
        .iter()
        .zip(&covered)
        .filter_map(|(&v, &c)| c.then_some(v))
        .collect();
    let scaler = fit_scaler(&fit_values)?;
    let all = make_windows(values, q, tau, &scaler)?;
    Ok(PreparedData {
        train: all.select(&idx.train),
        val: all.select(&idx.val),
        test: all.select(&idx.test),
        scaler,
        split: idx,
    })
}

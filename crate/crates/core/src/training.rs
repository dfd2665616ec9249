//! Minibatch Adam with early stopping, learning-rate reduction on plateau and
//! best-weights restoration.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::WindowedDataset;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::numerics::{mse_loss, Adam, AdamConfig, Matrix, ParamStore};
use crate::rng::{rng_for, Stream};

/// Rows per forward pass when scoring a whole set.
const EVAL_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub lr_initial: f64,
    pub es_patience: usize,
    /// First (1-based) epoch whose validation loss early stopping looks at.
    pub es_start_epoch: usize,
    pub es_min_delta: f64,
    pub plateau_factor: f64,
    pub plateau_patience: usize,
    pub lr_min: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 1000,
            batch_size: 256,
            lr_initial: 1e-3,
            es_patience: 10,
            es_start_epoch: 6,
            es_min_delta: 1e-5,
            plateau_factor: 0.25,
            plateau_patience: 5,
            lr_min: 2.5e-5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.max_epochs,
            self.batch_size,
            self.es_patience,
            self.es_start_epoch,
            self.plateau_patience,
        ];
        if counts.contains(&0) {
            return Err(Error::Config(format!("training counts must be >= 1: {self:?}")));
        }
        if !(self.plateau_factor > 0.0 && self.plateau_factor < 1.0) {
            return Err(Error::Config(format!(
                "plateau_factor must lie in (0, 1), got {}",
                self.plateau_factor
            )));
        }
        if !(self.lr_initial > 0.0) || !(self.lr_min > 0.0) || self.lr_min > self.lr_initial {
            return Err(Error::Config(format!(
                "need 0 < lr_min <= lr_initial (got {} and {})",
                self.lr_min, self.lr_initial
            )));
        }
        if !(self.es_min_delta >= 0.0) {
            return Err(Error::Config("es_min_delta must be >= 0".into()));
        }
        Ok(())
    }
}

/// Stops once validation loss has failed to improve by `min_delta` for
/// `patience` consecutive monitored epochs. Epochs before `start_epoch` are
/// ignored entirely, so the first monitored epoch only sets the baseline and
/// the earliest possible stop is `start_epoch + patience`.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    start_epoch: usize,
    min_delta: f64,
    best: f64,
    wait: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize, start_epoch: usize, min_delta: f64) -> Self {
        Self {
            patience,
            start_epoch,
            min_delta,
            best: f64::INFINITY,
            wait: 0,
        }
    }

    /// Returns `true` when training should stop after `epoch` (1-based).
    pub fn update(&mut self, epoch: usize, val_loss: f64) -> bool {
        if epoch < self.start_epoch {
            return false;
        }
        if val_loss < self.best - self.min_delta {
            self.best = val_loss;
            self.wait = 0;
        } else {
            self.wait += 1;
        }
        self.wait >= self.patience
    }
}

/// Multiplies the learning rate by `factor` after `patience` epochs without an
/// improvement of at least `min_delta`, never going below `min_lr`.
#[derive(Debug, Clone)]
pub struct PlateauScheduler {
    factor: f64,
    patience: usize,
    min_delta: f64,
    min_lr: f64,
    best: f64,
    wait: usize,
}

impl PlateauScheduler {
    pub fn new(factor: f64, patience: usize, min_delta: f64, min_lr: f64) -> Self {
        Self {
            factor,
            patience,
            min_delta,
            min_lr,
            best: f64::INFINITY,
            wait: 0,
        }
    }

    /// Learning rate to use for the next epoch.
    pub fn update(&mut self, val_loss: f64, lr: f64) -> f64 {
        if val_loss < self.best - self.min_delta {
            self.best = val_loss;
            self.wait = 0;
            return lr;
        }
        self.wait += 1;
        if self.wait >= self.patience && lr > self.min_lr {
            self.wait = 0;
            return (lr * self.factor).max(self.min_lr);
        }
        lr
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Learning rate used during the epoch.
    pub lr: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Epoch and value of the lowest validation loss (first one on ties).
    pub fn best(&self) -> Option<(usize, f64)> {
        self.records.iter().fold(None, |acc, r| match acc {
            Some((_, b)) if r.val_loss >= b => acc,
            _ => Some((r.epoch, r.val_loss)),
        })
    }

    /// `epoch,train_loss,val_loss,lr,seconds`
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for r in &self.records {
            wtr.serialize(r)?;
        }
        wtr.flush().map_err(|e| Error::io("<history>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(f)
    }
}

/// Borrowed `(inputs, targets)` pair.
#[derive(Debug, Clone, Copy)]
pub struct Samples<'a> {
    pub inputs: &'a Matrix,
    pub targets: &'a Matrix,
}

impl<'a> From<&'a WindowedDataset> for Samples<'a> {
    fn from(d: &'a WindowedDataset) -> Self {
        Samples {
            inputs: &d.inputs,
            targets: &d.targets,
        }
    }
}

impl Samples<'_> {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }
}

/// Mean squared error over a whole set, scored in fixed-size chunks.
pub fn evaluate_mse<M: Model>(model: &M, data: Samples<'_>) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Empty("evaluation set"));
    }
    let n = data.len();
    let mut sse = 0.0;
    let mut count = 0usize;
    for start in (0..n).step_by(EVAL_CHUNK) {
        let idx: Vec<usize> = (start..(start + EVAL_CHUNK).min(n)).collect();
        let pred = model.predict(&data.inputs.select_rows(&idx))?;
        let target = data.targets.select_rows(&idx);
        if pred.shape() != target.shape() {
            return Err(Error::dim("evaluate_mse", pred.shape_str(), target.shape_str()));
        }
        sse += pred
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>();
        count += pred.len();
    }
    Ok(sse / count as f64)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<M> {
    /// Carries the parameters from `best_epoch`.
    pub model: M,
    pub history: TrainHistory,
    pub best_epoch: usize,
    pub stopped_early: bool,
}

pub fn train<M: Model>(
    mut model: M,
    train_set: Samples<'_>,
    val_set: Samples<'_>,
    config: &TrainConfig,
) -> Result<TrainOutcome<M>> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if val_set.is_empty() {
        return Err(Error::Empty("validation set"));
    }
    let mut adam = Adam::new(
        model.params(),
        AdamConfig {
            lr: config.lr_initial,
            ..AdamConfig::default()
        },
    );
    let mut stopper = EarlyStopping::new(config.es_patience, config.es_start_epoch, config.es_min_delta);
    let mut plateau = PlateauScheduler::new(
        config.plateau_factor,
        config.plateau_patience,
        config.es_min_delta,
        config.lr_min,
    );
    let mut rng = rng_for(config.seed, Stream::Shuffle);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = TrainHistory::default();
    let mut best: Option<(usize, f64, ParamStore)> = None;
    let mut stopped_early = false;

    for epoch in 1..=config.max_epochs {
        let started = Instant::now();
        let lr = adam.lr();
        order.shuffle(&mut rng);
        let mut weighted = 0.0;
        for (batch, rows) in order.chunks(config.batch_size).enumerate() {
            let x = train_set.inputs.select_rows(rows);
            let y = train_set.targets.select_rows(rows);
            let (pred, cache) = model.forward(&x)?;
            let (loss, d_pred) = mse_loss(&pred, &y)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch });
            }
            let grads = model.backward(&cache, &d_pred)?;
            adam.step(model.params_mut(), &grads)?;
            weighted += loss * rows.len() as f64;
        }
        let train_loss = weighted / train_set.len() as f64;
        let val_loss = evaluate_mse(&model, val_set)?;
        if !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, batch: usize::MAX });
        }
        history.records.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            lr,
            seconds: started.elapsed().as_secs_f64(),
        });
        log::debug!("epoch {epoch}: train {train_loss:.6e} val {val_loss:.6e} lr {lr:.3e}");

        if best.as_ref().is_none_or(|(_, b, _)| val_loss < *b) {
            best = Some((epoch, val_loss, model.params().clone()));
        }
        adam.set_lr(plateau.update(val_loss, lr));
        if stopper.update(epoch, val_loss) {
            stopped_early = true;
            break;
        }
    }

    let (best_epoch, _, params) = best.expect("at least one epoch ran");
    *model.params_mut() = params;
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
        stopped_early,
    })
}

/// Full-batch Adam for `steps` iterations with no validation or stopping.
///
/// Returns the trained model and the training loss after the last step
/// (the initial loss when `steps == 0`).
pub fn overfit_probe<M: Model>(mut model: M, data: Samples<'_>, steps: usize, lr: f64) -> Result<(M, f64)> {
    if data.is_empty() || data.len() > 64 {
        return Err(Error::Config(format!(
            "overfit probe expects 1..=64 rows, got {}",
            data.len()
        )));
    }
    let mut adam = Adam::new(
        model.params(),
        AdamConfig {
            lr,
            ..AdamConfig::default()
        },
    );
    for step in 0..steps {
        let (loss, grads) = model.loss_and_grad(data.inputs, data.targets)?;
        if !loss.is_finite() || loss > 1e6 {
            return Err(Error::Diverged { step, loss });
        }
        adam.step(model.params_mut(), &grads)?;
    }
    let (pred, _) = model.forward(data.inputs)?;
    let (loss, _) = mse_loss(&pred, data.targets)?;
    if !loss.is_finite() || loss > 1e6 {
        return Err(Error::Diverged { step: steps, loss });
    }
    Ok((model, loss))
}

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{DaeModel, ForwardCache, Gradients};
use crate::error::{Error, Result};
use crate::rng::substream;
use crate::trace::FEATURE_DIM;

/// Mini-batch gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Seed of the per-epoch shuffles. Set by the pipeline from the master seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.00095,
            batch_size: 64,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::Config("dae.epochs and dae.batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "dae.learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean training loss of each epoch.
    pub epoch_losses: Vec<f64>,
    /// Mean loss on the training set before the first update.
    pub initial_loss: f64,
    /// Final per-sample loss on every training sample.
    pub train_losses: Vec<f64>,
    /// Final per-sample loss on every validation sample.
    pub val_losses: Vec<f64>,
    pub params: TrainParams,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Trains with plain mini-batch gradient descent on the mean per-sample
/// Euclidean reconstruction error, reporting each epoch to `on_epoch`.
///
/// Aborts when an epoch's mean loss exceeds ten times the initial loss.
pub fn train_with(
    mut model: DaeModel,
    train_set: &[[f64; FEATURE_DIM]],
    val_set: &[[f64; FEATURE_DIM]],
    params: &TrainParams,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<(DaeModel, TrainReport)> {
    params.validate()?;
    if train_set.is_empty() {
        return Err(Error::InvalidInput("training set is empty".into()));
    }
    if train_set.iter().chain(val_set).flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("training data contains non-finite values".into()));
    }
    let initial_loss = mean(&model.score_all(train_set));
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut cache = ForwardCache::new(&model);
    let mut grads = Gradients::zeros(&model);
    let (mut delta, mut delta_prev) = (Vec::new(), Vec::new());
    let mut epoch_losses = Vec::with_capacity(params.epochs);

    for epoch in 0..params.epochs {
        order.shuffle(&mut substream(params.seed, &[epoch as u64]));
        let mut total = 0.0;
        for batch in order.chunks(params.batch_size) {
            grads.clear();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let x = &train_set[i];
                model.forward_into(x, &mut cache);
                total += model.backward_into(&cache, x, scale, &mut grads, &mut delta, &mut delta_prev);
            }
            model.apply_gradients(&grads, params.learning_rate);
        }
        let epoch_loss = total / train_set.len() as f64;
        if !epoch_loss.is_finite() || epoch_loss > 10.0 * initial_loss {
            return Err(Error::Divergence {
                epoch,
                loss: epoch_loss,
                initial: initial_loss,
            });
        }
        epoch_losses.push(epoch_loss);
        on_epoch(epoch, epoch_loss);
    }

    let train_losses = model.score_all(train_set);
    let val_losses = model.score_all(val_set);
    Ok((
        model,
        TrainReport {
            epoch_losses,
            initial_loss,
            train_losses,
            val_losses,
            params: *params,
        },
    ))
}

pub fn train(
    model: DaeModel,
    train_set: &[[f64; FEATURE_DIM]],
    val_set: &[[f64; FEATURE_DIM]],
    params: &TrainParams,
) -> Result<(DaeModel, TrainReport)> {
    train_with(model, train_set, val_set, params, |_, _| {})
}

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grad::{loss_and_gradients, mse_loss, Example};
use super::{MlpModel, Params};
use crate::datagen::DataRecord;
use crate::densitysim::Magnetizations;
use crate::seed::{derive_seed, rng_from_seed, SeedStream};
use crate::{Error, Real, Result};

/// Adam and mini-batch settings. `epsilon` defaults to `1e-8`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
    pub batch_size: usize,
    pub epochs: usize,
    pub init_seed: u64,
    pub shuffle_seed: u64,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            lr: T::of(3e-4),
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            epsilon: T::of(1e-8),
            batch_size: 80,
            epochs: 100,
            init_seed: 0,
            shuffle_seed: 0,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let unit = |b: T| b >= T::zero() && b < T::one();
        if !(self.lr > T::zero() && self.lr.is_finite()) {
            return Err(Error::InvalidParameter(format!("lr must be positive, got {}", self.lr)));
        }
        if !unit(self.beta1) || !unit(self.beta2) {
            return Err(Error::InvalidParameter(format!(
                "beta1 and beta2 must lie in [0, 1), got {} and {}",
                self.beta1, self.beta2
            )));
        }
        if !(self.epsilon > T::zero() && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// First and second moments plus the step counter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState<T> {
    pub m: Params<T>,
    pub v: Params<T>,
    pub t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(model: &MlpModel<T>) -> Self {
        let zeros = Params::zeros(model.n_in, model.n_hidden, model.n_out);
        Self {
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }
}

/// Bias-corrected Adam update, in place.
pub fn adam_step<T: Real>(
    model: &mut MlpModel<T>,
    grads: &Params<T>,
    state: &mut AdamState<T>,
    cfg: &TrainConfig<T>,
) -> Result<()> {
    let n = model.params.len();
    if grads.len() != n || state.m.len() != n || state.v.len() != n {
        return Err(Error::ShapeMismatch("gradient or moment shapes differ from the model".into()));
    }
    state.t += 1;
    let t = state.t as i32;
    let c1 = T::one() - cfg.beta1.powi(t);
    let c2 = T::one() - cfg.beta2.powi(t);
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    for (((p, g), m), v) in model
        .params
        .iter_mut()
        .zip(grads.iter())
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = b1 * *m + (T::one() - b1) * *g;
        *v = b2 * *v + (T::one() - b2) * *g * *g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p = *p - cfg.lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss<T> {
    pub epoch: usize,
    /// Mean of the mini-batch losses, weighted by batch size, taken before each update.
    pub train_loss: T,
    pub val_loss: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory<T> {
    pub epochs: Vec<EpochLoss<T>>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_val_loss: T,
}

/// Mini-batch Adam with early stopping: returns the parameters from the epoch
/// with the lowest validation loss. The sample order is reshuffled every epoch
/// and the last, shorter batch is kept.
pub fn train<T: Real>(
    mut model: MlpModel<T>,
    train_set: &[Example<T>],
    val_set: &[Example<T>],
    cfg: &TrainConfig<T>,
) -> Result<(MlpModel<T>, TrainHistory<T>)> {
    cfg.validate()?;
    model.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidInput("training and validation sets must be nonempty".into()));
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be at least 1".into()));
    }
    let mut state = AdamState::new(&model);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut batch: Vec<Example<T>> = Vec::with_capacity(cfg.batch_size);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(usize, T, MlpModel<T>)> = None;
    let n_train = T::from_usize(train_set.len()).unwrap();

    for epoch in 1..=cfg.epochs {
        order.sort_unstable();
        order.shuffle(&mut rng_from_seed(derive_seed(cfg.shuffle_seed, SeedStream::Shuffle, epoch as u64)));
        let mut running = T::zero();
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| train_set[i].clone()));
            let (loss, grads) = loss_and_gradients(&model, &batch)?;
            running = running + loss * T::from_usize(chunk.len()).unwrap();
            adam_step(&mut model, &grads, &mut state, cfg)?;
        }
        let val_loss = mse_loss(&model, val_set)?;
        if !val_loss.is_finite() {
            return Err(Error::InvalidInput(format!("validation loss diverged at epoch {epoch}")));
        }
        history.push(EpochLoss {
            epoch,
            train_loss: running / n_train,
            val_loss,
        });
        if best.as_ref().is_none_or(|(_, b, _)| val_loss < *b) {
            best = Some((epoch, val_loss, model.clone()));
        }
    }
    let (best_epoch, best_val_loss, best_model) = best.expect("at least one epoch");
    Ok((
        best_model,
        TrainHistory {
            epochs: history,
            best_epoch,
            best_val_loss,
        },
    ))
}

/// `(m_noisy, m_ideal)` pairs.
pub fn examples_from_records<T: Real>(records: &[DataRecord<T>]) -> Vec<Example<T>> {
    records
        .iter()
        .map(|r| (r.m_noisy.to_vec(), r.m_ideal.to_vec()))
        .collect()
}

pub fn predict<T: Real>(model: &MlpModel<T>, m_noisy: &Magnetizations<T>) -> Result<Magnetizations<T>> {
    Ok(model.forward(m_noisy)?.into())
}

/// Corrected magnetizations for every record, in record order.
pub fn predict_dataset<T: Real>(model: &MlpModel<T>, records: &[DataRecord<T>]) -> Result<Vec<Magnetizations<T>>> {
    records.par_iter().map(|r| predict(model, &r.m_noisy)).collect()
}

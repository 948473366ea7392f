//! One-hidden-layer perceptron mapping noisy magnetizations to corrected ones.

mod grad;
mod io;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::{derive_seed, rng_from_seed, SeedStream};
use crate::{Error, Real, Result};

pub use grad::{backward, loss_and_gradients, mse_loss, Example};
pub use io::{read_model, write_model, ModelFile, MODEL_FORMAT};
pub use train::{
    adam_step, examples_from_records, predict, predict_dataset, train, AdamState, EpochLoss,
    TrainConfig, TrainHistory,
};

/// Number of spins in the paper's ladder; default input and output width.
pub const N_SPINS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            // Always evaluated in f64.
            Activation::Tanh => T::of(z.as_f64().tanh()),
        }
    }

    /// Derivative given pre-activation `z` and output `a`. ReLU'(0) is 0.
    fn derivative<T: Real>(self, z: T, a: T) -> T {
        match self {
            Activation::Relu => {
                if z > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Tanh => T::one() - a * a,
        }
    }
}

/// Weights and biases. Also used for gradients and Adam moments.
/// Matrices are row-major: `w1` is `n_hidden x n_in`, `w2` is `n_out x n_hidden`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: Vec<T>,
}

impl<T: Real> Params<T> {
    pub fn zeros(n_in: usize, n_hidden: usize, n_out: usize) -> Self {
        Self {
            w1: vec![T::zero(); n_hidden * n_in],
            b1: vec![T::zero(); n_hidden],
            w2: vec![T::zero(); n_out * n_hidden],
            b2: vec![T::zero(); n_out],
        }
    }

    pub fn len(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.w1
            .iter_mut()
            .chain(&mut self.b1)
            .chain(&mut self.w2)
            .chain(&mut self.b2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel<T> {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub params: Params<T>,
}

/// Paper architecture `6 -> n_hidden -> 6` with ReLU then Tanh.
pub fn init_model<T: Real>(n_hidden: usize, init_seed: u64) -> Result<MlpModel<T>> {
    init_model_with(N_SPINS, n_hidden, N_SPINS, init_seed)
}

/// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in))`, biases zero.
pub fn init_model_with<T: Real>(
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
    init_seed: u64,
) -> Result<MlpModel<T>> {
    if n_in == 0 || n_hidden == 0 || n_out == 0 {
        return Err(Error::InvalidParameter(format!(
            "layer widths must be positive, got {n_in}-{n_hidden}-{n_out}"
        )));
    }
    let mut rng = rng_from_seed(derive_seed(init_seed, SeedStream::Init, 0));
    let mut params = Params::zeros(n_in, n_hidden, n_out);
    let a1 = 1.0 / (n_in as f64).sqrt();
    for w in params.w1.iter_mut() {
        *w = T::of(rng.random_range(-a1..a1));
    }
    let a2 = 1.0 / (n_hidden as f64).sqrt();
    for w in params.w2.iter_mut() {
        *w = T::of(rng.random_range(-a2..a2));
    }
    Ok(MlpModel {
        n_in,
        n_hidden,
        n_out,
        hidden_activation: Activation::Relu,
        output_activation: Activation::Tanh,
        params,
    })
}

/// Intermediate values of one forward pass.
pub(crate) struct Pass<T> {
    pub z1: Vec<T>,
    pub h: Vec<T>,
    pub out: Vec<T>,
}

impl<T: Real> MlpModel<T> {
    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn validate(&self) -> Result<()> {
        let expected = Params::<T>::zeros(self.n_in, self.n_hidden, self.n_out);
        let p = &self.params;
        if self.n_in == 0
            || self.n_hidden == 0
            || self.n_out == 0
            || p.w1.len() != expected.w1.len()
            || p.b1.len() != expected.b1.len()
            || p.w2.len() != expected.w2.len()
            || p.b2.len() != expected.b2.len()
        {
            return Err(Error::ShapeMismatch(format!(
                "parameter arrays do not match a {}-{}-{} network",
                self.n_in, self.n_hidden, self.n_out
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite model parameter".into()));
        }
        Ok(())
    }

    pub(crate) fn pass(&self, x: &[T]) -> Pass<T> {
        let p = &self.params;
        let mut z1 = p.b1.clone();
        for (i, z) in z1.iter_mut().enumerate() {
            let row = &p.w1[i * self.n_in..(i + 1) * self.n_in];
            *z = *z + row.iter().zip(x).map(|(w, v)| *w * *v).sum::<T>();
        }
        let h: Vec<T> = z1.iter().map(|&z| self.hidden_activation.apply(z)).collect();
        let out = (0..self.n_out)
            .map(|k| {
                let row = &p.w2[k * self.n_hidden..(k + 1) * self.n_hidden];
                let z = p.b2[k] + row.iter().zip(&h).map(|(w, v)| *w * *v).sum::<T>();
                self.output_activation.apply(z)
            })
            .collect();
        Pass { z1, h, out }
    }

    /// Network output for one input vector.
    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n_in {
            return Err(Error::ShapeMismatch(format!(
                "input has {} components, model expects {}",
                x.len(),
                self.n_in
            )));
        }
        Ok(self.pass(x).out)
    }
}

/// Free-function form of [`MlpModel::forward`].
pub fn forward<T: Real>(model: &MlpModel<T>, x: &[T]) -> Result<Vec<T>> {
    model.forward(x)
}

#[cfg(test)]
mod tests;

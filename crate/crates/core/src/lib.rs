//! Echo-evolution error mitigation.
//!
//! Simulates noisy Trotterized dynamics of a transverse-field Ising model with
//! exact density matrices, builds (noisy, ideal) magnetization datasets from
//! echo evolution, trains a one-hidden-layer network to undo the noise, and
//! measures how well the correction carries over to forward-in-time dynamics.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the command-line pipeline uses.

pub mod datagen;
pub mod densitysim;
pub mod metrics;
pub mod neuralnet;
mod error;
pub mod scalar;
pub mod seed;
pub mod tfim;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DensityMatrix64 = densitysim::DensityMatrix<f64>;
pub type Circuit64 = densitysim::Circuit<f64>;
pub type Gate64 = densitysim::Gate<f64>;
pub type NoiseModel64 = densitysim::NoiseModel<f64>;
pub type Magnetizations64 = densitysim::Magnetizations<f64>;
pub type IsingParams64 = tfim::IsingParams<f64>;
pub type EchoConfig64 = datagen::EchoConfig<f64>;
pub type ForwardConfig64 = datagen::ForwardConfig<f64>;
pub type DataRecord64 = datagen::DataRecord<f64>;
pub type EchoDataset64 = datagen::EchoDataset<f64>;
pub type MlpModel64 = neuralnet::MlpModel<f64>;
pub type TrainConfig64 = neuralnet::TrainConfig<f64>;
pub type CorrectionReport64 = metrics::CorrectionReport<f64>;
pub type ForwardReport64 = metrics::ForwardReport<f64>;
pub type SweepConfig64 = metrics::SweepConfig<f64>;

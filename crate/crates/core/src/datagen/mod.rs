//! (noisy, ideal) magnetization datasets from echo and forward-in-time evolution.

mod generate;
mod io;
mod split;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::densitysim::{Magnetizations, NoiseModel};
use crate::tfim::{IsingParams, Layout, DEFAULT_CNOT_PROB};
use crate::{Error, Real, Result};

pub use generate::{generate_echo_dataset, generate_echo_dataset_with, generate_forward_testset, generate_forward_testset_with};
pub use io::{read_dataset, write_dataset, write_dataset_csv};
pub use split::{split_dataset, Split, SplitSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Echo,
    Forward,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Echo => "echo",
            Mode::Forward => "forward",
        }
    }
}

/// How magnetizations are read out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Measurement {
    /// Exact expectation values.
    Exact,
    /// Computational-basis sampling; applied to both the ideal and the noisy side.
    Shots { shots: u32 },
}

/// Simulation route. Both give the same numbers up to rounding; the Heisenberg
/// route propagates each magnetization observable backward through the noisy
/// circuit once and then only needs an inner product per prepared state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Heisenberg,
    Schrodinger,
}

impl Engine {
    /// Heisenberg for exact expectations; sampling needs the evolved state.
    pub fn for_measurement(m: Measurement) -> Self {
        match m {
            Measurement::Exact => Engine::Heisenberg,
            Measurement::Shots { .. } => Engine::Schrodinger,
        }
    }
}

/// Echo-evolution generation parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig<T> {
    pub params: IsingParams<T>,
    pub layout: Layout,
    pub noise: NoiseModel<T>,
    pub n_states: usize,
    /// Echo times; each runs `n_trotter_each_way` steps forward to `t`, then back.
    pub time_points: Vec<T>,
    pub n_trotter_each_way: usize,
    pub cnot_prob: T,
    /// Run the preparation circuit under noise too.
    pub noisy_prep: bool,
    pub measurement: Measurement,
    pub seed: u64,
}

impl<T: Real> Default for EchoConfig<T> {
    fn default() -> Self {
        Self {
            params: IsingParams::paper_default(),
            layout: Layout::ladder6(),
            noise: NoiseModel {
                q1: T::of(1e-4),
                q2: T::of(0.01),
            },
            n_states: 2400,
            time_points: (0..5).map(|k| T::of(k as f64 * PI / 8.0)).collect(),
            n_trotter_each_way: 10,
            cnot_prob: T::of(DEFAULT_CNOT_PROB),
            noisy_prep: false,
            measurement: Measurement::Exact,
            seed: 0,
        }
    }
}

/// Forward-in-time test-set parameters. Time points are `k * t_max / (n - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardConfig<T> {
    pub params: IsingParams<T>,
    pub layout: Layout,
    pub noise: NoiseModel<T>,
    pub n_states: usize,
    pub n_time_points: usize,
    pub t_max: T,
    pub n_trotter: usize,
    pub cnot_prob: T,
    pub noisy_prep: bool,
    pub measurement: Measurement,
    pub seed: u64,
}

impl<T: Real> Default for ForwardConfig<T> {
    fn default() -> Self {
        let echo = EchoConfig::<T>::default();
        Self {
            params: echo.params,
            layout: echo.layout,
            noise: echo.noise,
            n_states: 100,
            n_time_points: 20,
            t_max: T::PI(),
            n_trotter: 20,
            cnot_prob: echo.cnot_prob,
            noisy_prep: false,
            measurement: Measurement::Exact,
            seed: 0,
        }
    }
}

impl<T: Real> ForwardConfig<T> {
    pub fn time_grid(&self) -> Vec<T> {
        if self.n_time_points == 1 {
            return vec![T::zero()];
        }
        let last = T::from_usize(self.n_time_points - 1).unwrap();
        (0..self.n_time_points)
            .map(|k| self.t_max * T::from_usize(k).unwrap() / last)
            .collect()
    }
}

/// Generation parameters stored in a dataset header; enough to regenerate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DatasetConfig<T> {
    Echo(EchoConfig<T>),
    Forward(ForwardConfig<T>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataRecord<T> {
    pub mode: Mode,
    pub state_id: u64,
    pub prep_seed: u64,
    pub time_index: usize,
    pub t: T,
    pub m_ideal: Magnetizations<T>,
    pub m_noisy: Magnetizations<T>,
    /// Exact-exponential magnetizations, forward records only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_exact: Option<Magnetizations<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EchoDataset<T> {
    pub config: DatasetConfig<T>,
    pub engine: Engine,
    pub records: Vec<DataRecord<T>>,
}

impl<T: Real> EchoDataset<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Checks component ranges and `(state_id, time_index, mode)` uniqueness.
    pub fn validate(&self) -> Result<()> {
        let mut keys = std::collections::HashSet::with_capacity(self.records.len());
        for r in &self.records {
            if !keys.insert((r.state_id, r.time_index, r.mode)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate record key (state {}, time index {}, {})",
                    r.state_id,
                    r.time_index,
                    r.mode.as_str()
                )));
            }
            let vectors = [Some(&r.m_ideal), Some(&r.m_noisy), r.m_exact.as_ref()];
            for m in vectors.into_iter().flatten() {
                if m.iter().any(|&v| !(v >= -T::one() && v <= T::one())) {
                    return Err(Error::InvalidInput(format!(
                        "magnetization outside [-1, 1] in state {}",
                        r.state_id
                    )));
                }
            }
        }
        Ok(())
    }
}

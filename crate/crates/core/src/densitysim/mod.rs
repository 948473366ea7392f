//! Exact density-matrix simulation of small registers with per-gate
//! depolarizing noise.

mod circuit;
mod gate;
mod matrix;
mod measure;
mod noise;
mod state;

pub use circuit::{propagate_observable, run_circuit, run_circuit_with, Circuit, GateCounts, Operation};
pub use gate::Gate;
pub use measure::{magnetizations, sample_magnetizations, Magnetizations};
pub use noise::{apply_depolarizing_1q, apply_depolarizing_2q, NoiseModel};
pub(crate) use noise::check_probability;
pub use state::{apply_gate, DensityMatrix, Observable};

#[cfg(test)]
mod tests;

use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::qubit_mask;
use super::state::DensityMatrix;
use crate::seed::rng_from_seed;
use crate::{Error, Real, Result};

/// Per-spin magnetizations `m_i = 2 n_i - 1`, one entry per qubit, each in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Magnetizations<T>(pub Vec<T>);

impl<T: Real> Magnetizations<T> {
    /// Chain average `(1/N) sum_i m_i`.
    pub fn average(&self) -> T {
        let n = T::from_usize(self.0.len()).unwrap();
        self.0.iter().copied().sum::<T>() / n
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Magnetizations<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for Magnetizations<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

fn diagonal<T: Real>(state: &DensityMatrix<T>) -> Vec<T> {
    (0..state.dim()).map(|i| state.get(i, i).re).collect()
}

/// Exact magnetizations from the excitation numbers `n_i = Tr(rho |1><1|_i)`.
pub fn magnetizations<T: Real>(state: &DensityMatrix<T>) -> Magnetizations<T> {
    let n = state.n_qubits();
    let diag = diagonal(state);
    let two = T::of(2.0);
    (0..n)
        .map(|q| {
            let mask = qubit_mask(n, q);
            let excited: T = diag
                .iter()
                .enumerate()
                .filter(|(i, _)| i & mask != 0)
                .map(|(_, p)| *p)
                .sum();
            two * excited - T::one()
        })
        .collect::<Vec<_>>()
        .into()
}

/// Shot-noise estimate: `shots` computational-basis samples from `diag(rho)`,
/// `n_i` estimated as the fraction of samples with qubit `i` excited.
pub fn sample_magnetizations<T: Real>(
    state: &DensityMatrix<T>,
    shots: u32,
    rng_seed: u64,
) -> Result<Magnetizations<T>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let n = state.n_qubits();
    let mut cumulative = Vec::with_capacity(state.dim());
    let mut acc = 0.0f64;
    for p in diagonal(state) {
        acc += p.as_f64().max(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    let mut rng = rng_from_seed(rng_seed);
    let mut excited = vec![0u64; n];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let outcome = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        for (q, count) in excited.iter_mut().enumerate() {
            if outcome & qubit_mask(n, q) != 0 {
                *count += 1;
            }
        }
    }
    let shots = shots as f64;
    Ok(excited
        .into_iter()
        .map(|c| T::of(2.0 * c as f64 / shots - 1.0))
        .collect::<Vec<_>>()
        .into())
}

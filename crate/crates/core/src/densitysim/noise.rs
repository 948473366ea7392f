use serde::{Deserialize, Serialize};

use super::state::DensityMatrix;
use crate::{Error, Real, Result};

/// Depolarizing intensities for single-qubit (`q1`) and two-qubit (`q2`) gates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    pub q1: T,
    pub q2: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn new(q1: T, q2: T) -> Result<Self> {
        check_probability("q1", q1)?;
        check_probability("q2", q2)?;
        Ok(Self { q1, q2 })
    }

    pub fn noiseless() -> Self {
        Self {
            q1: T::zero(),
            q2: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("q1", self.q1)?;
        check_probability("q2", self.q2)
    }
}

pub(crate) fn check_probability<T: Real>(name: &str, p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
    }
}

fn check_qubit(n_qubits: usize, qubit: usize) -> Result<()> {
    if qubit < n_qubits {
        Ok(())
    } else {
        Err(Error::InvalidGate(format!(
            "channel addresses qubit {qubit} on a {n_qubits}-qubit register"
        )))
    }
}

/// `(1 - q) rho + q (I/2 (x) Tr_qubit rho)`, i.e. the single-qubit depolarizing
/// channel acting on `qubit` of the full register.
pub fn apply_depolarizing_1q<T: Real>(
    state: &DensityMatrix<T>,
    qubit: usize,
    q: T,
) -> Result<DensityMatrix<T>> {
    check_probability("q1", q)?;
    check_qubit(state.n_qubits(), qubit)?;
    let mut out = state.clone();
    out.inner.depolarize_1q(qubit, q);
    Ok(out)
}

/// `(1 - q) rho + q (I/4 (x) Tr_{a,b} rho)` on the qubit pair.
pub fn apply_depolarizing_2q<T: Real>(
    state: &DensityMatrix<T>,
    qubits: (usize, usize),
    q: T,
) -> Result<DensityMatrix<T>> {
    check_probability("q2", q)?;
    check_qubit(state.n_qubits(), qubits.0)?;
    check_qubit(state.n_qubits(), qubits.1)?;
    if qubits.0 == qubits.1 {
        return Err(Error::InvalidGate(format!(
            "two-qubit channel on repeated qubit {}",
            qubits.0
        )));
    }
    let mut out = state.clone();
    out.inner.depolarize_2q(qubits.0, qubits.1, q);
    Ok(out)
}

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::matrix::RegisterMatrix;
use super::noise::NoiseModel;
use super::state::{conjugate, DensityMatrix, Observable};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Operation<T> {
    pub gate: Gate<T>,
    /// Whether a depolarizing channel follows the gate.
    pub noisy: bool,
}

/// Ordered gate list over a fixed register, each gate tagged noisy or noiseless.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit<T> {
    n_qubits: usize,
    ops: Vec<Operation<T>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub rx: usize,
    pub rz: usize,
    pub u2: usize,
    pub cnot: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.rx + self.rz + self.u2 + self.cnot
    }
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn operations(&self) -> &[Operation<T>] {
        &self.ops
    }

    pub fn push(&mut self, gate: Gate<T>, noisy: bool) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.ops.push(Operation { gate, noisy });
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::ShapeMismatch(format!(
                "appending a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(())
    }

    pub fn set_noisy(&mut self, noisy: bool) {
        self.ops.iter_mut().for_each(|op| op.noisy = noisy);
    }

    /// Gate-by-gate inverse: reversed order, each gate inverted, flags kept.
    pub fn inverse(&self) -> Result<Circuit<T>> {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| {
                op.gate
                    .inverse()
                    .map(|gate| Operation { gate, noisy: op.noisy })
                    .ok_or_else(|| Error::InvalidGate(format!("{} has no in-set inverse", op.gate.name())))
            })
            .collect::<Result<_>>()?;
        Ok(Circuit {
            n_qubits: self.n_qubits,
            ops,
        })
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for op in &self.ops {
            match op.gate {
                Gate::Rx { .. } => counts.rx += 1,
                Gate::Rz { .. } => counts.rz += 1,
                Gate::U2 { .. } => counts.u2 += 1,
                Gate::Cnot { .. } => counts.cnot += 1,
            }
        }
        counts
    }

    /// One line per gate: index, gate with qubits and angles, noise flag.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, op) in self.ops.iter().enumerate() {
            let flag = if op.noisy { "noisy" } else { "noiseless" };
            let _ = writeln!(out, "{i:4} {} {flag}", op.gate);
        }
        out
    }

    /// Noiseless unitary of the circuit, built by left-multiplying gates onto
    /// the identity.
    pub fn unitary(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        let mut m = RegisterMatrix::<T>::identity(self.n_qubits);
        for op in &self.ops {
            match op.gate {
                Gate::Cnot { control, target } => m.left_cnot(control, target),
                Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::U2 { qubit, .. } => {
                    m.left_1q(qubit, &op.gate.matrix_1q().expect("single-qubit gate"))
                }
            }
        }
        m.to_nalgebra()
    }
}

fn channel_after<T: Real>(m: &mut RegisterMatrix<T>, gate: &Gate<T>, noise: &NoiseModel<T>) {
    match *gate {
        Gate::Cnot { control, target } => {
            if noise.q2 > T::zero() {
                m.depolarize_2q(control, target, noise.q2);
            }
        }
        Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::U2 { qubit, .. } => {
            if noise.q1 > T::zero() {
                m.depolarize_1q(qubit, noise.q1);
            }
        }
    }
}

/// Runs the circuit on `initial`. Each noisy-flagged gate is followed by a
/// depolarizing channel on exactly its qubits (`q1` after single-qubit gates,
/// `q2` on both qubits after CNOT).
pub fn run_circuit<T: Real>(
    circuit: &Circuit<T>,
    initial: &DensityMatrix<T>,
    noise: &NoiseModel<T>,
) -> Result<DensityMatrix<T>> {
    let mut state = initial.clone();
    run_circuit_with(circuit, &mut state, noise, |_, _| {})?;
    Ok(state)
}

/// Like [`run_circuit`], but calls `inspect(op_index, state)` after each gate
/// and its channel.
pub fn run_circuit_with<T: Real, F>(
    circuit: &Circuit<T>,
    state: &mut DensityMatrix<T>,
    noise: &NoiseModel<T>,
    mut inspect: F,
) -> Result<()>
where
    F: FnMut(usize, &DensityMatrix<T>),
{
    noise.validate()?;
    if circuit.n_qubits != state.n_qubits() {
        return Err(Error::ShapeMismatch(format!(
            "{}-qubit circuit on a {}-qubit state",
            circuit.n_qubits,
            state.n_qubits()
        )));
    }
    for (i, op) in circuit.ops.iter().enumerate() {
        state.apply_gate_mut(&op.gate)?;
        if op.noisy {
            channel_after(&mut state.inner, &op.gate, noise);
        }
        inspect(i, state);
    }
    Ok(())
}

/// Heisenberg-picture propagation: returns `Phi^dagger(O)` for the noisy
/// circuit map `Phi`, so that `Tr(Phi(rho) O) = Tr(rho Phi^dagger(O))` for every
/// `rho`. Pauli channels are self-adjoint, so each step undoes one gate with
/// `U^dagger O U` after passing `O` through the same depolarizing channel.
pub fn propagate_observable<T: Real>(
    circuit: &Circuit<T>,
    observable: &Observable<T>,
    noise: &NoiseModel<T>,
) -> Result<Observable<T>> {
    noise.validate()?;
    if circuit.n_qubits != observable.inner.n_qubits {
        return Err(Error::ShapeMismatch(
            "observable and circuit act on different registers".into(),
        ));
    }
    let mut o = observable.clone();
    for op in circuit.ops.iter().rev() {
        if op.noisy {
            channel_after(&mut o.inner, &op.gate, noise);
        }
        conjugate(&mut o.inner, &op.gate, true);
    }
    Ok(o)
}

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::matrix::Mat2;
use crate::{Error, Real, Result};

/// Gate set of the Trotter and state-preparation circuits. Angles in radians.
///
/// Rotations use the half-angle forms `RX(a) = exp(-i a X / 2)` and
/// `RZ(a) = exp(-i a Z / 2)`. `U2(theta, phi)` takes `|0>` to
/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`; its matrix is
/// `[[cos, -sin], [e^{i phi} sin, e^{i phi} cos]]` with half angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "lowercase")]
pub enum Gate<T> {
    Rx { qubit: usize, angle: T },
    Rz { qubit: usize, angle: T },
    U2 { qubit: usize, theta: T, phi: T },
    Cnot { control: usize, target: usize },
}

impl<T: Real> Gate<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Rz { .. } => "RZ",
            Gate::U2 { .. } => "U2",
            Gate::Cnot { .. } => "CNOT",
        }
    }

    /// Touched qubits; for CNOT, `[control, target]`.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::U2 { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        if let Some(&q) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::InvalidGate(format!(
                "{} addresses qubit {q} on a {n_qubits}-qubit register",
                self.name()
            )));
        }
        if let Gate::Cnot { control, target } = *self {
            if control == target {
                return Err(Error::InvalidGate(format!(
                    "CNOT control and target are both qubit {control}"
                )));
            }
        }
        Ok(())
    }

    /// 2x2 matrix of a single-qubit gate; `None` for CNOT.
    pub fn matrix_1q(&self) -> Option<[[Complex<T>; 2]; 2]> {
        let half = T::of(0.5);
        let zero = T::zero();
        match *self {
            Gate::Rx { angle, .. } => {
                let (s, c) = (angle * half).sin_cos();
                let diag = Complex::new(c, zero);
                let off = Complex::new(zero, -s);
                Some([[diag, off], [off, diag]])
            }
            Gate::Rz { angle, .. } => {
                let (s, c) = (angle * half).sin_cos();
                let z = Complex::new(zero, zero);
                Some([[Complex::new(c, -s), z], [z, Complex::new(c, s)]])
            }
            Gate::U2 { theta, phi, .. } => {
                let (s, c) = (theta * half).sin_cos();
                let e = Complex::from_polar(T::one(), phi);
                Some([
                    [Complex::new(c, zero), Complex::new(-s, zero)],
                    [e * s, e * c],
                ])
            }
            Gate::Cnot { .. } => None,
        }
    }

    /// Exact inverse when it lies in the gate set. `U2` has no inverse of the same form.
    pub fn inverse(&self) -> Option<Gate<T>> {
        match *self {
            Gate::Rx { qubit, angle } => Some(Gate::Rx { qubit, angle: -angle }),
            Gate::Rz { qubit, angle } => Some(Gate::Rz { qubit, angle: -angle }),
            Gate::Cnot { .. } => Some(*self),
            Gate::U2 { .. } => None,
        }
    }
}

pub(crate) fn dagger<T: Real>(u: &Mat2<T>) -> Mat2<T> {
    [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ]
}

impl<T: Real> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx { qubit, angle } => write!(f, "RX q{qubit} angle={angle:+.12}"),
            Gate::Rz { qubit, angle } => write!(f, "RZ q{qubit} angle={angle:+.12}"),
            Gate::U2 { qubit, theta, phi } => {
                write!(f, "U2 q{qubit} theta={theta:+.12} phi={phi:+.12}")
            }
            Gate::Cnot { control, target } => write!(f, "CNOT q{control} q{target}"),
        }
    }
}

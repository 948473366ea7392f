use num_complex::Complex;

use super::gate::{dagger, Gate};
use super::matrix::RegisterMatrix;
use crate::{Error, Real, Result};

/// Density matrix of an `n`-qubit register.
///
/// Qubit 0 is the most significant bit of a basis index: for three qubits,
/// `basis(3, 0b100)` is `|1 0 0>` with qubit 0 excited.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    pub(crate) inner: RegisterMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|0...0><0...0|`.
    pub fn ground(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Projector onto the computational basis state `index`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits >= 1, "register needs at least one qubit");
        let mut inner = RegisterMatrix::zeros(n_qubits);
        let dim = inner.dim();
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        inner.data[index * dim + index] = Complex::new(T::one(), T::zero());
        Self { inner }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let mut inner = RegisterMatrix::<T>::identity(n_qubits);
        let scale = T::one() / T::from_usize(inner.dim()).unwrap();
        inner.data.iter_mut().for_each(|v| *v = *v * scale);
        Self { inner }
    }

    /// `|psi><psi|` for a normalized state vector of length `2^n`.
    pub fn from_pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::ShapeMismatch(format!(
                "state vector length {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let mut inner = RegisterMatrix::zeros(n_qubits);
        for (r, a) in amplitudes.iter().enumerate() {
            for (c, b) in amplitudes.iter().enumerate() {
                inner.data[r * dim + c] = *a * b.conj();
            }
        }
        Ok(Self { inner })
    }

    /// Wraps a row-major `2^n x 2^n` matrix without checking positivity.
    pub fn from_row_major(n_qubits: usize, data: Vec<Complex<T>>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "{} elements for a {n_qubits}-qubit density matrix",
                data.len()
            )));
        }
        Ok(Self {
            inner: RegisterMatrix { n_qubits, data },
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.inner.at(row, col)
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.inner.data
    }

    pub fn trace(&self) -> Complex<T> {
        self.inner.trace()
    }

    /// Largest elementwise `|rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> T {
        self.inner.hermiticity_error()
    }

    /// Smallest eigenvalue, computed in `f64`.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.inner.to_nalgebra();
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.inner.max_abs_diff(&other.inner)
    }

    /// `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, alpha: T, other: &Self) -> Result<Self> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::ShapeMismatch("mixing registers of different size".into()));
        }
        let beta = T::one() - alpha;
        let data = self
            .inner
            .data
            .iter()
            .zip(&other.inner.data)
            .map(|(a, b)| *a * alpha + *b * beta)
            .collect();
        Self::from_row_major(self.n_qubits(), data)
    }

    pub(crate) fn apply_gate_mut(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits())?;
        conjugate(&mut self.inner, gate, false);
        Ok(())
    }
}

/// Applies `rho -> U rho U^dagger` (or `U^dagger rho U` when `adjoint`).
pub(crate) fn conjugate<T: Real>(m: &mut RegisterMatrix<T>, gate: &Gate<T>, adjoint: bool) {
    match *gate {
        Gate::Cnot { control, target } => m.conjugate_cnot(control, target),
        Gate::Rz { qubit, .. } => {
            let u = gate.matrix_1q().expect("single-qubit gate");
            let (d0, d1) = if adjoint {
                (u[0][0].conj(), u[1][1].conj())
            } else {
                (u[0][0], u[1][1])
            };
            m.conjugate_diag_1q(qubit, d0, d1);
        }
        Gate::Rx { qubit, .. } | Gate::U2 { qubit, .. } => {
            let u = gate.matrix_1q().expect("single-qubit gate");
            let u = if adjoint { dagger(&u) } else { u };
            m.conjugate_1q(qubit, &u);
        }
    }
}

/// Returns `U rho U^dagger`; the input state is left untouched.
pub fn apply_gate<T: Real>(state: &DensityMatrix<T>, gate: &Gate<T>) -> Result<DensityMatrix<T>> {
    let mut out = state.clone();
    out.apply_gate_mut(gate)?;
    Ok(out)
}

/// Hermitian operator on the register, used for Heisenberg-picture propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable<T> {
    pub(crate) inner: RegisterMatrix<T>,
}

impl<T: Real> Observable<T> {
    /// Pauli Z on one qubit, identity elsewhere.
    pub fn pauli_z(n_qubits: usize, qubit: usize) -> Self {
        let mut inner = RegisterMatrix::<T>::identity(n_qubits);
        let dim = inner.dim();
        let mask = super::matrix::qubit_mask(n_qubits, qubit);
        for i in (0..dim).filter(|i| i & mask != 0) {
            inner.data[i * dim + i] = Complex::new(-T::one(), T::zero());
        }
        Self { inner }
    }

    /// `2 |1><1|_qubit - I = -Z_qubit`, whose expectation is the spin magnetization.
    pub fn magnetization(n_qubits: usize, qubit: usize) -> Self {
        let mut o = Self::pauli_z(n_qubits, qubit);
        o.inner.data.iter_mut().for_each(|v| *v = -*v);
        o
    }

    /// `Re Tr(rho O)`.
    pub fn expectation(&self, state: &DensityMatrix<T>) -> T {
        self.inner.trace_product_re(&state.inner)
    }

    /// `<psi| O |psi>` for a state vector.
    pub fn expectation_pure(&self, amplitudes: &[Complex<T>]) -> T {
        let dim = self.inner.dim();
        let mut acc = T::zero();
        for (r, a) in amplitudes.iter().enumerate().take(dim) {
            let row = &self.inner.data[r * dim..(r + 1) * dim];
            let mut s = Complex::new(T::zero(), T::zero());
            for (o, b) in row.iter().zip(amplitudes) {
                s = s + *o * *b;
            }
            acc = acc + (a.conj() * s).re;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.inner.max_abs_diff(&other.inner)
    }

    /// Builds `V^dagger O V` from a dense unitary `V` given in `f64`.
    pub(crate) fn conjugated_by_dense(&self, v: &nalgebra::DMatrix<num_complex::Complex64>) -> Self {
        let o = self.inner.to_nalgebra();
        let r = v.adjoint() * o * v;
        let dim = self.inner.dim();
        let mut inner = RegisterMatrix::zeros(self.inner.n_qubits);
        for row in 0..dim {
            for col in 0..dim {
                let z = r[(row, col)];
                inner.data[row * dim + col] = Complex::new(T::of(z.re), T::of(z.im));
            }
        }
        Self { inner }
    }
}

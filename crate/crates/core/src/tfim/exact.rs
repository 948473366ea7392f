use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{IsingParams, Layout};
use crate::Real;

/// Dense `H = -h sum_i X_i - J sum_edges Z_a Z_b`, in `f64`.
pub fn hamiltonian<T: Real>(params: &IsingParams<T>, layout: &Layout) -> DMatrix<Complex64> {
    let n = layout.n_qubits();
    let dim = 1usize << n;
    let h = params.h.as_f64();
    let j = params.j.as_f64();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let z = |i: usize, q: usize| if i & bit(q) == 0 { 1.0 } else { -1.0 };
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        let diag: f64 = layout.edges().iter().map(|&(a, b)| -j * z(i, a) * z(i, b)).sum();
        m[(i, i)] += diag;
        for q in 0..n {
            m[(i ^ bit(q), i)] += -h;
        }
    }
    m
}

/// `exp(-i H t)` from the eigendecomposition of the Hermitian `H`. Dense, so
/// only meant for small registers.
pub fn exact_unitary<T: Real>(params: &IsingParams<T>, layout: &Layout, t: T) -> DMatrix<Complex64> {
    assert!(layout.n_qubits() <= 10, "dense exponential limited to 10 qubits");
    let t = t.as_f64();
    let eig = hamiltonian(params, layout).symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    v * phases * v.adjoint()
}

use super::{Direction, EvolutionSpec, IsingParams, Layout};
use crate::densitysim::{Circuit, Gate};
use crate::{Real, Result};

/// One first-order step `exp(i dt J sum ZZ) exp(i dt h sum X)`.
///
/// The transverse layer comes first: `RX(-2 h dt)` on every qubit, which equals
/// `exp(i h dt X)`. Each edge then gets `CNOT(a,b) RZ_b(-2 J dt) CNOT(a,b)`,
/// which equals `exp(i J dt Z_a Z_b)`. Angles carry the minus sign because the
/// Hamiltonian enters with negative coefficients. All gates are flagged noisy;
/// zero angles are kept so the depth does not depend on `dt`.
pub fn trotter_step<T: Real>(params: &IsingParams<T>, layout: &Layout, dt: T) -> Circuit<T> {
    let two = T::of(2.0);
    let rx_angle = -two * params.h * dt;
    let rz_angle = -two * params.j * dt;
    let mut c = Circuit::new(layout.n_qubits());
    for qubit in 0..layout.n_qubits() {
        c.push(Gate::Rx { qubit, angle: rx_angle }, true)
            .expect("layout qubits are in range");
    }
    for &(a, b) in layout.edges() {
        for gate in [
            Gate::Cnot { control: a, target: b },
            Gate::Rz { qubit: b, angle: rz_angle },
            Gate::Cnot { control: a, target: b },
        ] {
            c.push(gate, true).expect("layout edges are valid");
        }
    }
    c
}

/// `n_trotter` steps of size `t / n_trotter`.
pub fn build_forward_circuit<T: Real>(
    params: &IsingParams<T>,
    layout: &Layout,
    t: T,
    n_trotter: usize,
) -> Result<Circuit<T>> {
    EvolutionSpec { t, n_trotter, direction: Direction::Forward }.validate()?;
    let dt = t / T::from_usize(n_trotter).unwrap();
    let step = trotter_step(params, layout, dt);
    let mut c = Circuit::new(layout.n_qubits());
    for _ in 0..n_trotter {
        c.append(&step)?;
    }
    Ok(c)
}

/// Forward evolution for `t` followed by its gate-by-gate inverse.
pub fn build_echo_circuit<T: Real>(
    params: &IsingParams<T>,
    layout: &Layout,
    t: T,
    n_trotter_each_way: usize,
) -> Result<Circuit<T>> {
    let forward = build_forward_circuit(params, layout, t, n_trotter_each_way)?;
    let mut c = forward.clone();
    c.append(&forward.inverse()?)?;
    Ok(c)
}

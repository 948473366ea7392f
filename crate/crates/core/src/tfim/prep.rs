use std::f64::consts::TAU;

use rand::Rng;

use super::Layout;
use crate::densitysim::{Circuit, Gate};
use crate::densitysim::check_probability;
use crate::seed::rng_from_seed;
use crate::{Real, Result};

pub const DEFAULT_CNOT_PROB: f64 = 0.2;

/// Random state-preparation circuit, all gates noiseless-flagged.
///
/// A layer of `U2(theta_j, phi_j)` with `theta_j = arccos(x)`, `x ~ U[-1, 1]`
/// and `phi_j ~ U[0, 2 pi)`, then a CNOT on each layout edge with probability
/// `cnot_prob` (control on the lower index).
pub fn build_prep_circuit<T: Real>(rng_seed: u64, layout: &Layout, cnot_prob: T) -> Result<Circuit<T>> {
    check_probability("cnot_prob", cnot_prob)?;
    let p = cnot_prob.as_f64();
    let mut rng = rng_from_seed(rng_seed);
    let mut c = Circuit::new(layout.n_qubits());
    for qubit in 0..layout.n_qubits() {
        let x: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..TAU);
        c.push(
            Gate::U2 {
                qubit,
                theta: T::of(x.acos()),
                phi: T::of(phi),
            },
            false,
        )?;
    }
    for &(control, target) in layout.edges() {
        // One draw per edge, whatever p is, so edge decisions stay aligned across p.
        let u: f64 = rng.random();
        if u < p {
            c.push(Gate::Cnot { control, target }, false)?;
        }
    }
    Ok(c)
}

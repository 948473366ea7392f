//! Transverse-field Ising model `H = -h sum_i X_i - J sum_<ij> Z_i Z_j` on a
//! coupling graph, its Trotterized circuits and random state preparation.

mod exact;
mod prep;
mod trotter;

use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

pub use exact::{exact_unitary, hamiltonian};
pub use prep::{build_prep_circuit, DEFAULT_CNOT_PROB};
pub use trotter::{build_echo_circuit, build_forward_circuit, trotter_step};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingParams<T> {
    /// On-site transverse field.
    pub h: T,
    /// Coupling between connected spins.
    pub j: T,
}

impl<T: Real> IsingParams<T> {
    pub fn new(h: T, j: T) -> Result<Self> {
        let p = Self { h, j };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > T::zero() && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!("h = {} must be positive", self.h)));
        }
        if !(self.j > T::zero() && self.j.is_finite()) {
            return Err(Error::InvalidParameter(format!("J = {} must be positive", self.j)));
        }
        Ok(())
    }

    /// `h = 1`, `J = h/2`.
    pub fn paper_default() -> Self {
        Self {
            h: T::one(),
            j: T::of(0.5),
        }
    }
}

/// Qubit count plus undirected coupling edges, each stored as `(low, high)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLayout")]
pub struct Layout {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawLayout {
    n_qubits: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawLayout> for Layout {
    type Error = Error;

    fn try_from(raw: RawLayout) -> Result<Self> {
        Layout::new(raw.n_qubits, raw.edges)
    }
}

impl Layout {
    /// Edge order is preserved; it fixes the order of coupling gates in a Trotter step.
    pub fn new(n_qubits: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("layout needs at least one qubit".into()));
        }
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on qubit {a}")));
            }
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) outside a {n_qubits}-qubit layout"
                )));
            }
            let e = (a.min(b), a.max(b));
            if normalized.contains(&e) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({a}, {b})")));
            }
            normalized.push(e);
        }
        Ok(Self {
            n_qubits,
            edges: normalized,
        })
    }

    /// Six qubits on a 2x3 ladder:
    ///
    /// ```text
    /// 0 - 1
    /// |   |
    /// 2 - 3
    /// |   |
    /// 4 - 5
    /// ```
    ///
    /// Rungs first, then the rails in the order of the parallel gate layers
    /// `{(0,2), (1,3)}` and `{(2,4), (3,5)}`.
    pub fn ladder6() -> Self {
        Self::new(6, vec![(0, 1), (2, 3), (4, 5), (0, 2), (1, 3), (2, 4), (3, 5)])
            .expect("ladder is a valid layout")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, qubit: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == qubit || b == qubit)
            .count()
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Direction of evolution a circuit implements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
    Echo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSpec<T> {
    pub t: T,
    pub n_trotter: usize,
    pub direction: Direction,
}

impl<T: Real> EvolutionSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_trotter == 0 {
            return Err(Error::InvalidParameter("at least one Trotter step is required".into()));
        }
        if !(self.t >= T::zero() && self.t.is_finite()) {
            return Err(Error::InvalidParameter(format!("evolution time {} must be >= 0", self.t)));
        }
        Ok(())
    }
}

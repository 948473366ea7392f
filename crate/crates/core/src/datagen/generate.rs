use rayon::prelude::*;

use super::{
    DataRecord, DatasetConfig, EchoConfig, EchoDataset, Engine, ForwardConfig, Measurement, Mode,
};
use crate::densitysim::{
    magnetizations, propagate_observable, run_circuit, sample_magnetizations, Circuit, DensityMatrix,
    Magnetizations, NoiseModel, Observable,
};
use crate::seed::{derive_record_seed, derive_seed, SeedStream};
use crate::tfim::{
    build_echo_circuit, build_forward_circuit, build_prep_circuit, exact_unitary, IsingParams, Layout,
};
use crate::{Error, Real, Result};

struct Prep<'a, T> {
    layout: &'a Layout,
    noise: &'a NoiseModel<T>,
    cnot_prob: T,
    noisy: bool,
    seed: u64,
    stream: SeedStream,
}

impl<T: Real> Prep<'_, T> {
    fn seed_for(&self, state_id: u64) -> u64 {
        derive_seed(self.seed, self.stream, state_id)
    }

    fn state(&self, state_id: u64) -> Result<(u64, DensityMatrix<T>)> {
        let prep_seed = self.seed_for(state_id);
        let mut circuit = build_prep_circuit(prep_seed, self.layout, self.cnot_prob)?;
        if self.noisy {
            circuit.set_noisy(true);
        }
        let rho = run_circuit(&circuit, &DensityMatrix::ground(self.layout.n_qubits()), self.noise)?;
        Ok((prep_seed, rho))
    }
}

fn clamp<T: Real>(m: Magnetizations<T>) -> Magnetizations<T> {
    m.0.into_iter()
        .map(|v| v.max(-T::one()).min(T::one()))
        .collect::<Vec<_>>()
        .into()
}

fn readout<T: Real>(
    rho: &DensityMatrix<T>,
    measurement: Measurement,
    seed: u64,
    stream: SeedStream,
    state_id: u64,
    time_index: usize,
) -> Result<Magnetizations<T>> {
    match measurement {
        Measurement::Exact => Ok(clamp(magnetizations(rho))),
        Measurement::Shots { shots } => sample_magnetizations(
            rho,
            shots,
            derive_record_seed(seed, stream, state_id, time_index as u64),
        ),
    }
}

fn expectations<T: Real>(observables: &[Observable<T>], rho: &DensityMatrix<T>) -> Magnetizations<T> {
    clamp(observables.iter().map(|o| o.expectation(rho)).collect::<Vec<_>>().into())
}

fn heisenberg_observables<T: Real>(
    circuit: &Circuit<T>,
    noise: &NoiseModel<T>,
) -> Result<Vec<Observable<T>>> {
    let n = circuit.n_qubits();
    (0..n)
        .map(|q| propagate_observable(circuit, &Observable::magnetization(n, q), noise))
        .collect()
}

fn check_common<T: Real>(params: &IsingParams<T>, noise: &NoiseModel<T>, n_states: usize, measurement: Measurement) -> Result<()> {
    params.validate()?;
    noise.validate()?;
    if n_states == 0 {
        return Err(Error::InvalidParameter("n_states must be at least 1".into()));
    }
    if let Measurement::Shots { shots: 0 } = measurement {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    Ok(())
}

/// Echo dataset with the engine picked from the measurement mode.
pub fn generate_echo_dataset<T: Real>(cfg: &EchoConfig<T>) -> Result<EchoDataset<T>> {
    generate_echo_dataset_with(cfg, Engine::for_measurement(cfg.measurement))
}

/// For every prepared state, `m_ideal` is read from the prepared state itself
/// and `m_noisy` after the noisy echo circuit of each time point. Records come
/// out ordered by `(state_id, time_index)` regardless of scheduling.
pub fn generate_echo_dataset_with<T: Real>(cfg: &EchoConfig<T>, engine: Engine) -> Result<EchoDataset<T>> {
    check_common(&cfg.params, &cfg.noise, cfg.n_states, cfg.measurement)?;
    if cfg.time_points.is_empty() {
        return Err(Error::InvalidParameter("at least one time point is required".into()));
    }
    if engine == Engine::Heisenberg && cfg.measurement != Measurement::Exact {
        return Err(Error::InvalidParameter(
            "shot sampling needs the Schrodinger engine".into(),
        ));
    }
    let circuits = cfg
        .time_points
        .iter()
        .map(|&t| build_echo_circuit(&cfg.params, &cfg.layout, t, cfg.n_trotter_each_way))
        .collect::<Result<Vec<_>>>()?;
    let prep = Prep {
        layout: &cfg.layout,
        noise: &cfg.noise,
        cnot_prob: cfg.cnot_prob,
        noisy: cfg.noisy_prep,
        seed: cfg.seed,
        stream: SeedStream::Prep,
    };
    let record = |state_id: u64, time_index: usize, prep_seed: u64, m_ideal, m_noisy| DataRecord {
        mode: Mode::Echo,
        state_id,
        prep_seed,
        time_index,
        t: cfg.time_points[time_index],
        m_ideal,
        m_noisy,
        m_exact: None,
    };

    let records: Vec<DataRecord<T>> = match engine {
        Engine::Heisenberg => {
            let observables = circuits
                .par_iter()
                .map(|c| heisenberg_observables(c, &cfg.noise))
                .collect::<Result<Vec<_>>>()?;
            let per_state = (0..cfg.n_states as u64)
                .into_par_iter()
                .map(|state_id| {
                    let (prep_seed, rho) = prep.state(state_id)?;
                    let ideal = clamp(magnetizations(&rho));
                    Ok(observables
                        .iter()
                        .enumerate()
                        .map(|(k, obs)| record(state_id, k, prep_seed, ideal.clone(), expectations(obs, &rho)))
                        .collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            per_state.into_iter().flatten().collect()
        }
        Engine::Schrodinger => {
            let n_times = circuits.len();
            (0..cfg.n_states * n_times)
                .into_par_iter()
                .map(|task| {
                    let state_id = (task / n_times) as u64;
                    let k = task % n_times;
                    let (prep_seed, rho) = prep.state(state_id)?;
                    let m_ideal = readout(&rho, cfg.measurement, cfg.seed, SeedStream::ShotIdeal, state_id, k)?;
                    let evolved = run_circuit(&circuits[k], &rho, &cfg.noise)?;
                    let m_noisy = readout(&evolved, cfg.measurement, cfg.seed, SeedStream::ShotNoisy, state_id, k)?;
                    Ok(record(state_id, k, prep_seed, m_ideal, m_noisy))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(EchoDataset {
        config: DatasetConfig::Echo(cfg.clone()),
        engine,
        records,
    })
}

pub fn generate_forward_testset<T: Real>(cfg: &ForwardConfig<T>) -> Result<EchoDataset<T>> {
    generate_forward_testset_with(cfg, Engine::for_measurement(cfg.measurement))
}

/// `m_ideal` follows the noiseless Trotter circuit, `m_noisy` the same circuit
/// under noise, and `m_exact` the exact exponential.
pub fn generate_forward_testset_with<T: Real>(cfg: &ForwardConfig<T>, engine: Engine) -> Result<EchoDataset<T>> {
    check_common(&cfg.params, &cfg.noise, cfg.n_states, cfg.measurement)?;
    if cfg.n_time_points == 0 {
        return Err(Error::InvalidParameter("at least one time point is required".into()));
    }
    if engine == Engine::Heisenberg && cfg.measurement != Measurement::Exact {
        return Err(Error::InvalidParameter(
            "shot sampling needs the Schrodinger engine".into(),
        ));
    }
    let times = cfg.time_grid();
    let n = cfg.layout.n_qubits();
    let circuits = times
        .iter()
        .map(|&t| build_forward_circuit(&cfg.params, &cfg.layout, t, cfg.n_trotter))
        .collect::<Result<Vec<_>>>()?;
    let exact_obs: Vec<Vec<Observable<T>>> = times
        .par_iter()
        .map(|&t| {
            let u = exact_unitary(&cfg.params, &cfg.layout, t);
            (0..n)
                .map(|q| Observable::magnetization(n, q).conjugated_by_dense(&u))
                .collect()
        })
        .collect();
    let prep = Prep {
        layout: &cfg.layout,
        noise: &cfg.noise,
        cnot_prob: cfg.cnot_prob,
        noisy: cfg.noisy_prep,
        seed: cfg.seed,
        stream: SeedStream::ForwardPrep,
    };
    let record = |state_id: u64, k: usize, prep_seed: u64, m_ideal, m_noisy, m_exact| DataRecord {
        mode: Mode::Forward,
        state_id,
        prep_seed,
        time_index: k,
        t: times[k],
        m_ideal,
        m_noisy,
        m_exact: Some(m_exact),
    };
    let noiseless = NoiseModel::noiseless();

    let records: Vec<DataRecord<T>> = match engine {
        Engine::Heisenberg => {
            let noisy_obs = circuits
                .par_iter()
                .map(|c| heisenberg_observables(c, &cfg.noise))
                .collect::<Result<Vec<_>>>()?;
            let ideal_obs = circuits
                .par_iter()
                .map(|c| heisenberg_observables(c, &noiseless))
                .collect::<Result<Vec<_>>>()?;
            let per_state = (0..cfg.n_states as u64)
                .into_par_iter()
                .map(|state_id| {
                    let (prep_seed, rho) = prep.state(state_id)?;
                    Ok((0..times.len())
                        .map(|k| {
                            record(
                                state_id,
                                k,
                                prep_seed,
                                expectations(&ideal_obs[k], &rho),
                                expectations(&noisy_obs[k], &rho),
                                expectations(&exact_obs[k], &rho),
                            )
                        })
                        .collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            per_state.into_iter().flatten().collect()
        }
        Engine::Schrodinger => {
            let n_times = times.len();
            (0..cfg.n_states * n_times)
                .into_par_iter()
                .map(|task| {
                    let state_id = (task / n_times) as u64;
                    let k = task % n_times;
                    let (prep_seed, rho) = prep.state(state_id)?;
                    let ideal = run_circuit(&circuits[k], &rho, &noiseless)?;
                    let noisy = run_circuit(&circuits[k], &rho, &cfg.noise)?;
                    Ok(record(
                        state_id,
                        k,
                        prep_seed,
                        readout(&ideal, cfg.measurement, cfg.seed, SeedStream::ShotIdeal, state_id, k)?,
                        readout(&noisy, cfg.measurement, cfg.seed, SeedStream::ShotNoisy, state_id, k)?,
                        expectations(&exact_obs[k], &rho),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(EchoDataset {
        config: DatasetConfig::Forward(cfg.clone()),
        engine,
        records,
    })
}

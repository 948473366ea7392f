//! Experiment configuration: one TOML document covering every stage.
//!
//! Component seeds left unset are derived from `master_seed`:
//! data generation uses the master seed itself (prep and shot streams are
//! split off inside the generator), and the split, init, shuffle and subset
//! seeds are `derive_seed(master_seed, <stream>, 0)`.

use std::f64::consts::PI;
use std::path::Path;

use echo_mitigation::datagen::{EchoConfig, ForwardConfig, Measurement, SplitSpec};
use echo_mitigation::densitysim::NoiseModel;
use echo_mitigation::metrics::{SweepConfig, PAPER_SWEEP_WIDTHS};
use echo_mitigation::neuralnet::TrainConfig;
use echo_mitigation::seed::{derive_seed, SeedStream};
use echo_mitigation::tfim::{IsingParams, Layout, DEFAULT_CNOT_PROB};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub ising: IsingSection,
    pub layout: LayoutSection,
    pub noise: NoiseSection,
    pub echo: EchoSection,
    pub forward: ForwardSection,
    pub measurement: Measurement,
    pub split: SplitSection,
    pub train: TrainSection,
    pub sweep: SweepSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingSection {
    pub h: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LayoutSection {
    Ladder6,
    Edges { n_qubits: usize, edges: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub q1: f64,
    pub q2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSection {
    pub n_states: usize,
    pub time_points: Vec<f64>,
    pub n_trotter_each_way: usize,
    pub cnot_prob: f64,
    pub noisy_prep: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardSection {
    /// Whether `generate` also writes the forward-in-time test set.
    pub enabled: bool,
    pub n_states: usize,
    pub n_time_points: usize,
    pub t_max: f64,
    pub n_trotter: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub width: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shuffle_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub widths: Vec<usize>,
    pub q2_levels: Vec<f64>,
    pub n_realizations: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_seed: Option<u64>,
}

/// Every seed a run uses, after filling in the derived ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub data: u64,
    pub split: u64,
    pub init: u64,
    pub shuffle: u64,
    pub subset: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let echo = EchoConfig::<f64>::default();
        let forward = ForwardConfig::<f64>::default();
        let split = SplitSpec::paper_default(0);
        let train = TrainConfig::<f64>::default();
        let sweep = SweepConfig::<f64>::default();
        Self {
            master_seed: 0,
            ising: IsingSection { h: 1.0, j: 0.5 },
            layout: LayoutSection::Ladder6,
            noise: NoiseSection {
                q1: echo.noise.q1,
                q2: echo.noise.q2,
            },
            echo: EchoSection {
                n_states: echo.n_states,
                time_points: echo.time_points,
                n_trotter_each_way: echo.n_trotter_each_way,
                cnot_prob: DEFAULT_CNOT_PROB,
                noisy_prep: false,
            },
            forward: ForwardSection {
                enabled: true,
                n_states: forward.n_states,
                n_time_points: forward.n_time_points,
                t_max: PI,
                n_trotter: forward.n_trotter,
            },
            measurement: Measurement::Exact,
            split: SplitSection {
                n_train: split.n_train,
                n_val: split.n_val,
                n_test: split.n_test,
                seed: None,
            },
            train: TrainSection {
                width: 200,
                lr: train.lr,
                beta1: train.beta1,
                beta2: train.beta2,
                epsilon: train.epsilon,
                batch_size: train.batch_size,
                epochs: train.epochs,
                init_seed: None,
                shuffle_seed: None,
            },
            sweep: SweepSection {
                widths: PAPER_SWEEP_WIDTHS.to_vec(),
                q2_levels: sweep.q2_levels,
                n_realizations: sweep.n_realizations,
                n_train: sweep.n_train,
                n_val: sweep.n_val,
                n_test: sweep.n_test,
                subset_seed: None,
            },
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config document.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn seeds(&self) -> Seeds {
        let m = self.master_seed;
        Seeds {
            master: m,
            data: m,
            split: self.split.seed.unwrap_or_else(|| derive_seed(m, SeedStream::Split, 0)),
            init: self.train.init_seed.unwrap_or_else(|| derive_seed(m, SeedStream::Init, 0)),
            shuffle: self.train.shuffle_seed.unwrap_or_else(|| derive_seed(m, SeedStream::Shuffle, 0)),
            subset: self.sweep.subset_seed.unwrap_or_else(|| derive_seed(m, SeedStream::Subset, 0)),
        }
    }

    pub fn layout(&self) -> Result<Layout, CliError> {
        match &self.layout {
            LayoutSection::Ladder6 => Ok(Layout::ladder6()),
            LayoutSection::Edges { n_qubits, edges } => {
                Layout::new(*n_qubits, edges.clone()).map_err(|e| CliError::Config(format!("layout: {e}")))
            }
        }
    }

    fn params(&self) -> IsingParams<f64> {
        IsingParams {
            h: self.ising.h,
            j: self.ising.j,
        }
    }

    fn noise(&self) -> NoiseModel<f64> {
        NoiseModel {
            q1: self.noise.q1,
            q2: self.noise.q2,
        }
    }

    pub fn echo_config(&self) -> Result<EchoConfig<f64>, CliError> {
        Ok(EchoConfig {
            params: self.params(),
            layout: self.layout()?,
            noise: self.noise(),
            n_states: self.echo.n_states,
            time_points: self.echo.time_points.clone(),
            n_trotter_each_way: self.echo.n_trotter_each_way,
            cnot_prob: self.echo.cnot_prob,
            noisy_prep: self.echo.noisy_prep,
            measurement: self.measurement,
            seed: self.seeds().data,
        })
    }

    pub fn forward_config(&self) -> Result<ForwardConfig<f64>, CliError> {
        Ok(ForwardConfig {
            params: self.params(),
            layout: self.layout()?,
            noise: self.noise(),
            n_states: self.forward.n_states,
            n_time_points: self.forward.n_time_points,
            t_max: self.forward.t_max,
            n_trotter: self.forward.n_trotter,
            cnot_prob: self.echo.cnot_prob,
            noisy_prep: self.echo.noisy_prep,
            measurement: self.measurement,
            seed: self.seeds().data,
        })
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            n_train: self.split.n_train,
            n_val: self.split.n_val,
            n_test: self.split.n_test,
            shuffle_seed: self.seeds().split,
        }
    }

    pub fn train_config(&self) -> TrainConfig<f64> {
        let seeds = self.seeds();
        TrainConfig {
            lr: self.train.lr,
            beta1: self.train.beta1,
            beta2: self.train.beta2,
            epsilon: self.train.epsilon,
            batch_size: self.train.batch_size,
            epochs: self.train.epochs,
            init_seed: seeds.init,
            shuffle_seed: seeds.shuffle,
        }
    }

    pub fn sweep_config(&self) -> SweepConfig<f64> {
        SweepConfig {
            widths: self.sweep.widths.clone(),
            q2_levels: self.sweep.q2_levels.clone(),
            n_realizations: self.sweep.n_realizations,
            n_train: self.sweep.n_train,
            n_val: self.sweep.n_val,
            n_test: self.sweep.n_test,
            train: self.train_config(),
            subset_seed: self.seeds().subset,
        }
    }

    /// Checks every section against the constraints of the stage that uses it.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, e: echo_mitigation::Error| CliError::Config(format!("{key}: {e}"));
        self.params().validate().map_err(|e| bad("ising", e))?;
        self.noise().validate().map_err(|e| bad("noise", e))?;
        self.layout()?;
        if !(0.0..=1.0).contains(&self.echo.cnot_prob) {
            return Err(CliError::Config(format!("echo.cnot_prob = {} must lie in [0, 1]", self.echo.cnot_prob)));
        }
        if self.echo.n_states == 0 || self.echo.time_points.is_empty() || self.echo.n_trotter_each_way == 0 {
            return Err(CliError::Config(
                "echo: n_states, time_points and n_trotter_each_way must be nonempty".into(),
            ));
        }
        if self.echo.time_points.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(CliError::Config("echo.time_points must be finite and nonnegative".into()));
        }
        if self.forward.n_states == 0 || self.forward.n_time_points == 0 || self.forward.n_trotter == 0 {
            return Err(CliError::Config(
                "forward: n_states, n_time_points and n_trotter must be positive".into(),
            ));
        }
        if !(self.forward.t_max.is_finite() && self.forward.t_max >= 0.0) {
            return Err(CliError::Config("forward.t_max must be finite and nonnegative".into()));
        }
        if let Measurement::Shots { shots: 0 } = self.measurement {
            return Err(CliError::Config("measurement.shots must be at least 1".into()));
        }
        if self.split.n_train == 0 || self.split.n_val == 0 || self.split.n_test == 0 {
            return Err(CliError::Config("split sizes must be positive".into()));
        }
        if self.train.width == 0 {
            return Err(CliError::Config("train.width must be positive".into()));
        }
        self.train_config().validate().map_err(|e| bad("train", e))?;
        self.sweep_config().validate().map_err(|e| bad("sweep", e))?;
        for &q2 in &self.sweep.q2_levels {
            NoiseModel { q1: self.noise.q1, q2 }
                .validate()
                .map_err(|e| bad("sweep.q2_levels", e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn shipped_paper_config_matches_defaults() {
        let text = include_str!("../../../configs/paper.cfg");
        assert_eq!(ExperimentConfig::from_toml(text).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn custom_layout_and_seeds_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.layout = LayoutSection::Edges {
            n_qubits: 6,
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)],
        };
        cfg.measurement = Measurement::Shots { shots: 1000 };
        cfg.split.seed = Some(11);
        cfg.train.init_seed = Some(12);
        cfg.echo.time_points = vec![0.1, 1.0 / 3.0, PI];
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.seeds().split, 11);
        assert_eq!(back.seeds().init, 12);
    }

    #[test]
    fn unset_seeds_follow_the_master_seed() {
        let mut a = ExperimentConfig::default();
        let s0 = a.seeds();
        a.master_seed = 1;
        let s1 = a.seeds();
        assert_ne!(s0.split, s1.split);
        assert_ne!(s0.init, s1.init);
        assert_ne!(s0.init, s0.shuffle);
        assert_eq!(s1.data, 1);
    }

    #[test]
    fn errors_name_the_key() {
        let text = ExperimentConfig::default().to_toml().replace("q2 = 0.01", "q2 = 1.5");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("noise"), "{err}");

        let text = ExperimentConfig::default().to_toml().replace("epochs = 100", "epochz = 100");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("epochz") && err.contains("line"), "{err}");

        let err = ExperimentConfig::from_toml("master_seed = \"x\"").unwrap_err().to_string();
        assert!(err.contains("master_seed"), "{err}");
    }
}

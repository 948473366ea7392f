//! Hidden-width study: many clone-initialized networks trained on random
//! subsets of one dataset per noise level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_echo_testset, mean, population_std, Stats};
use crate::datagen::{generate_echo_dataset, split_dataset, DataRecord, EchoConfig, SplitSpec};
use crate::neuralnet::{examples_from_records, init_model, train, TrainConfig};
use crate::seed::{derive_seed, SeedStream};
use crate::{Error, Real, Result};

/// Per-cell results and the aggregated rows.
pub type SweepOutput<T> = (Vec<CellResult<T>>, Vec<SweepResult<T>>);

pub const PAPER_SWEEP_WIDTHS: [usize; 15] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 25, 50, 100, 200];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig<T> {
    pub widths: Vec<usize>,
    pub q2_levels: Vec<T>,
    pub n_realizations: usize,
    /// Subset sizes; each realization draws `n_train + n_val + n_test` records
    /// without replacement.
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// `init_seed` is shared by every cell; the shuffle seed is varied per realization.
    pub train: TrainConfig<T>,
    pub subset_seed: u64,
}

impl<T: Real> Default for SweepConfig<T> {
    fn default() -> Self {
        Self {
            widths: PAPER_SWEEP_WIDTHS.to_vec(),
            q2_levels: vec![T::of(0.003), T::of(0.007), T::of(0.01)],
            n_realizations: 50,
            n_train: 4000,
            n_val: 1000,
            n_test: 1000,
            train: TrainConfig::default(),
            subset_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub q2_index: usize,
    pub width: usize,
    pub realization: usize,
}

impl<T: Real> SweepConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() || self.widths.contains(&0) {
            return Err(Error::InvalidParameter("widths must be a nonempty list of positive integers".into()));
        }
        if self.q2_levels.is_empty() {
            return Err(Error::InvalidParameter("at least one q2 level is required".into()));
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter("n_realizations must be at least 1".into()));
        }
        if self.n_train == 0 || self.n_val == 0 || self.n_test == 0 {
            return Err(Error::InvalidParameter("subset split sizes must be positive".into()));
        }
        self.train.validate()
    }

    /// Every cell, ordered by noise level, then width, then realization.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::with_capacity(self.q2_levels.len() * self.widths.len() * self.n_realizations);
        for q2_index in 0..self.q2_levels.len() {
            for &width in &self.widths {
                for realization in 0..self.n_realizations {
                    out.push(CellKey {
                        q2_index,
                        width,
                        realization,
                    });
                }
            }
        }
        out
    }
}

/// Subset and split of one realization. The same for every width and noise level.
pub fn cell_split_spec<T: Real>(cfg: &SweepConfig<T>, realization: usize) -> SplitSpec {
    SplitSpec {
        n_train: cfg.n_train,
        n_val: cfg.n_val,
        n_test: cfg.n_test,
        shuffle_seed: derive_seed(cfg.subset_seed, SeedStream::Subset, realization as u64),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult<T> {
    pub key: CellKey,
    pub q2: T,
    pub subset_seed: u64,
    pub init_seed: u64,
    pub shuffle_seed: u64,
    /// Mean K over the test split; `None` if every record there had `dm_before == 0`.
    pub mean_k: Option<T>,
    pub median_k: Option<T>,
    pub fraction_k_positive: T,
    pub n_undefined: usize,
    pub abs_dm_before: Stats<T>,
    pub abs_dm_after: Stats<T>,
    pub best_epoch: usize,
    pub best_val_loss: T,
}

/// Trains and evaluates one (noise level, width, realization) cell.
pub fn run_sweep_cell<T: Real>(
    records: &[DataRecord<T>],
    q2: T,
    key: CellKey,
    cfg: &SweepConfig<T>,
) -> Result<CellResult<T>> {
    let spec = cell_split_spec(cfg, key.realization);
    let split = split_dataset(records, &spec)?;
    let train_cfg = TrainConfig {
        shuffle_seed: derive_seed(cfg.train.shuffle_seed, SeedStream::Shuffle, key.realization as u64),
        ..cfg.train.clone()
    };
    let model = init_model(key.width, train_cfg.init_seed)?;
    let (best, history) = train(
        model,
        &examples_from_records(&split.train),
        &examples_from_records(&split.val),
        &train_cfg,
    )?;
    let report = evaluate_echo_testset(&best, &split.test)?;
    let s = report.summary;
    Ok(CellResult {
        key,
        q2,
        subset_seed: spec.shuffle_seed,
        init_seed: train_cfg.init_seed,
        shuffle_seed: train_cfg.shuffle_seed,
        mean_k: s.mean_k,
        median_k: s.median_k,
        fraction_k_positive: s.fraction_k_positive,
        n_undefined: s.n_undefined,
        abs_dm_before: s.abs_dm_before,
        abs_dm_after: s.abs_dm_after,
        best_epoch: history.best_epoch,
        best_val_loss: history.best_val_loss,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd<T> {
    pub mean: T,
    pub std: T,
}

impl<T: Real> MeanStd<T> {
    fn of(values: &[T]) -> Self {
        Self {
            mean: mean(values).unwrap_or_else(T::nan),
            std: population_std(values).unwrap_or_else(T::nan),
        }
    }
}

/// Realization spread of each `|dM|` statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSpread<T> {
    pub max: MeanStd<T>,
    pub median: MeanStd<T>,
    pub mean: MeanStd<T>,
}

impl<T: Real> StatsSpread<T> {
    fn of(stats: &[Stats<T>]) -> Self {
        let pick = |f: fn(&Stats<T>) -> T| MeanStd::of(&stats.iter().map(f).collect::<Vec<_>>());
        Self {
            max: pick(|s| s.max),
            median: pick(|s| s.median),
            mean: pick(|s| s.mean),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<T> {
    pub q2: T,
    pub hidden_width: usize,
    pub n_realizations: usize,
    /// Per-realization mean K, in realization order.
    pub k_per_realization: Vec<Option<T>>,
    /// Mean and population standard deviation over realizations with a defined K.
    pub k: MeanStd<T>,
    /// Spread of the per-realization median K.
    pub median_k: MeanStd<T>,
    pub fraction_k_positive: MeanStd<T>,
    pub abs_dm_before: StatsSpread<T>,
    pub abs_dm_after: StatsSpread<T>,
}

/// Groups cell results by (noise level, width), in config order.
pub fn aggregate_sweep<T: Real>(cfg: &SweepConfig<T>, cells: &[CellResult<T>]) -> Result<Vec<SweepResult<T>>> {
    let mut out = Vec::with_capacity(cfg.q2_levels.len() * cfg.widths.len());
    for (q2_index, &q2) in cfg.q2_levels.iter().enumerate() {
        for &width in &cfg.widths {
            let mut group: Vec<&CellResult<T>> = cells
                .iter()
                .filter(|c| c.key.q2_index == q2_index && c.key.width == width)
                .collect();
            group.sort_by_key(|c| c.key.realization);
            group.dedup_by_key(|c| c.key.realization);
            let complete = group.len() == cfg.n_realizations
                && group.iter().enumerate().all(|(i, c)| c.key.realization == i);
            if !complete {
                return Err(Error::InvalidInput(format!(
                    "q2 = {q2}, width {width}: {} of {} realizations present",
                    group.len(),
                    cfg.n_realizations
                )));
            }
            let k_per_realization: Vec<Option<T>> = group.iter().map(|c| c.mean_k).collect();
            let defined: Vec<T> = k_per_realization.iter().flatten().copied().collect();
            let medians: Vec<T> = group.iter().filter_map(|c| c.median_k).collect();
            let fractions: Vec<T> = group.iter().map(|c| c.fraction_k_positive).collect();
            let before: Vec<Stats<T>> = group.iter().map(|c| c.abs_dm_before).collect();
            let after: Vec<Stats<T>> = group.iter().map(|c| c.abs_dm_after).collect();
            out.push(SweepResult {
                q2,
                hidden_width: width,
                n_realizations: group.len(),
                k_per_realization,
                k: MeanStd::of(&defined),
                median_k: MeanStd::of(&medians),
                fraction_k_positive: MeanStd::of(&fractions),
                abs_dm_before: StatsSpread::of(&before),
                abs_dm_after: StatsSpread::of(&after),
            });
        }
    }
    Ok(out)
}

/// Runs every cell on pre-generated datasets, one per entry of `cfg.q2_levels`.
pub fn width_sweep_on<T: Real>(
    datasets: &[Vec<DataRecord<T>>],
    cfg: &SweepConfig<T>,
) -> Result<SweepOutput<T>> {
    cfg.validate()?;
    if datasets.len() != cfg.q2_levels.len() {
        return Err(Error::InvalidInput(format!(
            "{} datasets for {} noise levels",
            datasets.len(),
            cfg.q2_levels.len()
        )));
    }
    let cells = cfg
        .cells()
        .into_par_iter()
        .map(|key| run_sweep_cell(&datasets[key.q2_index], cfg.q2_levels[key.q2_index], key, cfg))
        .collect::<Result<Vec<_>>>()?;
    let results = aggregate_sweep(cfg, &cells)?;
    Ok((cells, results))
}

/// Generates one echo dataset per noise level from `base` (only `q2` changes,
/// so prepared states match across levels) and runs the sweep.
pub fn width_sweep<T: Real>(cfg: &SweepConfig<T>, base: &EchoConfig<T>) -> Result<SweepOutput<T>> {
    cfg.validate()?;
    let datasets = cfg
        .q2_levels
        .iter()
        .map(|&q2| {
            let mut echo = base.clone();
            echo.noise.q2 = q2;
            Ok(generate_echo_dataset(&echo)?.records)
        })
        .collect::<Result<Vec<_>>>()?;
    width_sweep_on(&datasets, cfg)
}

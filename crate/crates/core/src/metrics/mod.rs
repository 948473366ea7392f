//! Magnetization error, correction efficiency and evaluation reports.

mod export;
mod sweep;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::datagen::DataRecord;
use crate::densitysim::Magnetizations;
use crate::neuralnet::{predict_dataset, MlpModel};
use crate::{Error, Real, Result};

pub use export::{
    write_k_per_state_csv, write_k_sorted_csv, write_records_csv, write_sweep_cells_csv,
    write_sweep_stats_csv, write_trajectories_csv,
};
pub use sweep::{
    aggregate_sweep, cell_split_spec, run_sweep_cell, width_sweep, width_sweep_on, CellKey,
    CellResult, MeanStd, StatsSpread, SweepConfig, SweepOutput, SweepResult, PAPER_SWEEP_WIDTHS,
};

/// Chain-averaged difference `(1/N) sum_j (m_ideal_j - m_other_j)`.
pub fn delta_m<T: Real>(m_ideal: &[T], m_other: &[T]) -> Result<T> {
    if m_ideal.len() != m_other.len() || m_ideal.is_empty() {
        return Err(Error::InvalidInput(format!(
            "magnetization vectors of lengths {} and {}",
            m_ideal.len(),
            m_other.len()
        )));
    }
    let sum: T = m_ideal.iter().zip(m_other).map(|(a, b)| *a - *b).sum();
    Ok(sum / T::from_usize(m_ideal.len()).unwrap())
}

/// `1 - |dm_after| / |dm_before|`; `None` when `dm_before` is zero.
pub fn correction_k<T: Real>(dm_before: T, dm_after: T) -> Option<T> {
    if dm_before == T::zero() {
        None
    } else {
        Some(T::one() - dm_after.abs() / dm_before.abs())
    }
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean<T: Real>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().copied().sum::<T>() / T::from_usize(values.len()).unwrap())
}

/// Population standard deviation (divides by `n`); zero for a single value.
pub fn population_std<T: Real>(values: &[T]) -> Option<T> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (*v - m) * (*v - m)).sum::<T>() / T::from_usize(values.len()).unwrap();
    Some(var.sqrt())
}

/// Max, median and mean of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats<T> {
    pub max: T,
    pub median: T,
    pub mean: T,
}

impl<T: Real> Stats<T> {
    /// `None` for an empty sample. The median of an even-sized sample is the
    /// mean of the two middle values.
    pub fn of(values: &[T]) -> Option<Self> {
        let mean = mean(values)?;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / T::of(2.0)
        };
        Some(Self {
            max: sorted[n - 1],
            median,
            mean,
        })
    }
}

/// Correction outcome for one record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordCorrection<T> {
    pub state_id: u64,
    pub time_index: usize,
    pub t: T,
    pub avg_ideal: T,
    pub avg_noisy: T,
    pub avg_corrected: T,
    pub dm_before: T,
    pub dm_after: T,
    pub k: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary<T> {
    pub n_records: usize,
    /// Records with `dm_before == 0`, left out of every K aggregate.
    pub n_undefined: usize,
    pub n_positive: usize,
    /// `n_positive / (n_records - n_undefined)`.
    pub fraction_k_positive: T,
    pub mean_k: Option<T>,
    /// Robust companion to `mean_k`: K has a heavy negative tail when
    /// `|dm_before|` is tiny, and a single such record can dominate the mean.
    pub median_k: Option<T>,
    pub abs_dm_before: Stats<T>,
    pub abs_dm_after: Stats<T>,
}

impl<T: Real> ReportSummary<T> {
    /// Recomputes every aggregate from per-record rows.
    pub fn from_rows(rows: &[RecordCorrection<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("no records to summarize".into()));
        }
        let ks: Vec<T> = rows.iter().filter_map(|r| r.k).collect();
        let n_positive = ks.iter().filter(|&&k| k > T::zero()).count();
        let fraction_k_positive = if ks.is_empty() {
            T::zero()
        } else {
            T::from_usize(n_positive).unwrap() / T::from_usize(ks.len()).unwrap()
        };
        let before: Vec<T> = rows.iter().map(|r| r.dm_before.abs()).collect();
        let after: Vec<T> = rows.iter().map(|r| r.dm_after.abs()).collect();
        Ok(Self {
            n_records: rows.len(),
            n_undefined: rows.len() - ks.len(),
            n_positive,
            fraction_k_positive,
            mean_k: mean(&ks),
            median_k: Stats::of(&ks).map(|s| s.median),
            abs_dm_before: Stats::of(&before).expect("nonempty"),
            abs_dm_after: Stats::of(&after).expect("nonempty"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport<T> {
    pub rows: Vec<RecordCorrection<T>>,
    /// Network outputs, one per row.
    pub corrected: Vec<Magnetizations<T>>,
    pub summary: ReportSummary<T>,
}

impl<T: Real> CorrectionReport<T> {
    /// Row indices ordered by ascending K; undefined K last, ties in row order.
    pub fn order_by_k(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by(|&a, &b| cmp_k(self.rows[a].k, self.rows[b].k));
        idx
    }
}

fn cmp_k<T: Real>(a: Option<T>, b: Option<T>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Runs the model on every record and compares noisy and corrected chain averages with the ideal one.
pub fn correct_records<T: Real>(model: &MlpModel<T>, records: &[DataRecord<T>]) -> Result<CorrectionReport<T>> {
    if records.is_empty() {
        return Err(Error::InvalidInput("empty test set".into()));
    }
    if let Some(r) = records.iter().find(|r| r.m_noisy.len() != model.n_in || r.m_ideal.len() != model.n_out) {
        return Err(Error::ShapeMismatch(format!(
            "record with {} spins for a {}-{}-{} network",
            r.m_noisy.len(),
            model.n_in,
            model.n_hidden,
            model.n_out
        )));
    }
    let corrected = predict_dataset(model, records)?;
    let rows = records
        .iter()
        .zip(&corrected)
        .map(|(r, c)| {
            let dm_before = delta_m(&r.m_ideal, &r.m_noisy)?;
            let dm_after = delta_m(&r.m_ideal, c)?;
            Ok(RecordCorrection {
                state_id: r.state_id,
                time_index: r.time_index,
                t: r.t,
                avg_ideal: r.m_ideal.average(),
                avg_noisy: r.m_noisy.average(),
                avg_corrected: c.average(),
                dm_before,
                dm_after,
                k: correction_k(dm_before, dm_after),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = ReportSummary::from_rows(&rows)?;
    Ok(CorrectionReport {
        rows,
        corrected,
        summary,
    })
}

/// Per-record K on a hold-out split of echo data.
pub fn evaluate_echo_testset<T: Real>(model: &MlpModel<T>, test_records: &[DataRecord<T>]) -> Result<CorrectionReport<T>> {
    correct_records(model, test_records)
}

/// Time-averaged correction efficiency of one initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateK<T> {
    pub state_id: u64,
    /// Mean of the per-time-point K of the chain average.
    pub mean_k: Option<T>,
    /// Mean of the per-spin, per-time-point K over all spins.
    pub mean_k_single_spin: Option<T>,
    pub n_time_points: usize,
    pub n_undefined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardReport<T> {
    pub report: CorrectionReport<T>,
    /// Ordered by state id.
    pub per_state: Vec<StateK<T>>,
    /// States with `mean_k > 0` over states where it is defined.
    pub fraction_states_k_positive: T,
    pub mean_state_k: Option<T>,
    pub mean_state_k_single_spin: Option<T>,
}

impl<T: Real> ForwardReport<T> {
    /// Indices into `per_state` by ascending `mean_k`; undefined last.
    pub fn order_by_k(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.per_state.len()).collect();
        idx.sort_by(|&a, &b| cmp_k(self.per_state[a].mean_k, self.per_state[b].mean_k));
        idx
    }
}

/// Per-(state, time) K on forward-in-time records, then K averaged over each
/// state's time points.
pub fn evaluate_forward<T: Real>(model: &MlpModel<T>, forward_records: &[DataRecord<T>]) -> Result<ForwardReport<T>> {
    let report = correct_records(model, forward_records)?;
    let mut groups: BTreeMap<u64, (Vec<T>, Vec<T>, usize, usize)> = BTreeMap::new();
    for ((row, rec), corr) in report.rows.iter().zip(forward_records).zip(&report.corrected) {
        let g = groups.entry(row.state_id).or_default();
        g.2 += 1;
        match row.k {
            Some(k) => g.0.push(k),
            None => g.3 += 1,
        }
        for j in 0..rec.m_ideal.len() {
            let before = rec.m_ideal[j] - rec.m_noisy[j];
            let after = rec.m_ideal[j] - corr[j];
            if let Some(k) = correction_k(before, after) {
                g.1.push(k);
            }
        }
    }
    let per_state: Vec<StateK<T>> = groups
        .into_iter()
        .map(|(state_id, (ks, spin_ks, n, undefined))| StateK {
            state_id,
            mean_k: mean(&ks),
            mean_k_single_spin: mean(&spin_ks),
            n_time_points: n,
            n_undefined: undefined,
        })
        .collect();
    let defined: Vec<T> = per_state.iter().filter_map(|s| s.mean_k).collect();
    let single: Vec<T> = per_state.iter().filter_map(|s| s.mean_k_single_spin).collect();
    let positive = defined.iter().filter(|&&k| k > T::zero()).count();
    let fraction_states_k_positive = if defined.is_empty() {
        T::zero()
    } else {
        T::from_usize(positive).unwrap() / T::from_usize(defined.len()).unwrap()
    };
    Ok(ForwardReport {
        report,
        per_state,
        fraction_states_k_positive,
        mean_state_k: mean(&defined),
        mean_state_k_single_spin: mean(&single),
    })
}

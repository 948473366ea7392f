//! CSV tables. Floats use the shortest representation that parses back to the
//! same value, so K recomputed from the exported `dm_*` columns matches the
//! exported K exactly. Undefined K is an empty cell.

use std::io::Write;

use super::{CellResult, CorrectionReport, ForwardReport, RecordCorrection, SweepResult};
use crate::datagen::DataRecord;
use crate::{Error, Real, Result};

fn opt<T: Real>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

const RECORD_COLUMNS: [&str; 9] = [
    "state_id",
    "time_index",
    "t",
    "avg_ideal",
    "avg_noisy",
    "avg_corrected",
    "dm_before",
    "dm_after",
    "k",
];

fn record_fields<T: Real>(r: &RecordCorrection<T>) -> Vec<String> {
    vec![
        r.state_id.to_string(),
        r.time_index.to_string(),
        r.t.to_string(),
        r.avg_ideal.to_string(),
        r.avg_noisy.to_string(),
        r.avg_corrected.to_string(),
        r.dm_before.to_string(),
        r.dm_after.to_string(),
        opt(r.k),
    ]
}

/// One row per record, in record order.
pub fn write_records_csv<T: Real, W: Write>(report: &CorrectionReport<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in &report.rows {
        w.write_record(record_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Same columns preceded by `rank`, ordered by ascending K.
pub fn write_k_sorted_csv<T: Real, W: Write>(report: &CorrectionReport<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("rank").chain(RECORD_COLUMNS))?;
    for (rank, i) in report.order_by_k().into_iter().enumerate() {
        let mut row = vec![rank.to_string()];
        row.extend(record_fields(&report.rows[i]));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `rank,state_id,mean_k,mean_k_single_spin,n_time_points,n_undefined`, ordered by ascending `mean_k`.
pub fn write_k_per_state_csv<T: Real, W: Write>(report: &ForwardReport<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "state_id", "mean_k", "mean_k_single_spin", "n_time_points", "n_undefined"])?;
    for (rank, i) in report.order_by_k().into_iter().enumerate() {
        let s = &report.per_state[i];
        w.write_record([
            rank.to_string(),
            s.state_id.to_string(),
            opt(s.mean_k),
            opt(s.mean_k_single_spin),
            s.n_time_points.to_string(),
            s.n_undefined.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `state_id,t,spin,m_ideal,m_noisy,m_corrected,m_exact`: one row per spin per
/// record, then a row with `spin = avg` for the chain average. `m_exact` is
/// empty for echo records.
pub fn write_trajectories_csv<T: Real, W: Write>(
    records: &[DataRecord<T>],
    report: &CorrectionReport<T>,
    out: W,
) -> Result<()> {
    if records.len() != report.corrected.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} records but {} corrected vectors",
            records.len(),
            report.corrected.len()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["state_id", "t", "spin", "m_ideal", "m_noisy", "m_corrected", "m_exact"])?;
    for (r, c) in records.iter().zip(&report.corrected) {
        for j in 0..r.m_ideal.len() {
            w.write_record([
                r.state_id.to_string(),
                r.t.to_string(),
                j.to_string(),
                r.m_ideal[j].to_string(),
                r.m_noisy[j].to_string(),
                c[j].to_string(),
                opt(r.m_exact.as_ref().map(|m| m[j])),
            ])?;
        }
        w.write_record([
            r.state_id.to_string(),
            r.t.to_string(),
            "avg".to_string(),
            r.m_ideal.average().to_string(),
            r.m_noisy.average().to_string(),
            c.average().to_string(),
            opt(r.m_exact.as_ref().map(|m| m.average())),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (noise level, width): K mean and std, then mean and std over
/// realizations of the max, median and mean `|dM|` before and after correction,
/// then the spread of the per-realization median K and fraction of K > 0.
pub fn write_sweep_stats_csv<T: Real, W: Write>(results: &[SweepResult<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["q2".to_string(), "width".into(), "n_realizations".into(), "mean_K".into(), "std_K".into()];
    for side in ["before", "after"] {
        for stat in ["max", "median", "mean"] {
            header.push(format!("{stat}_abs_dm_{side}_mean"));
            header.push(format!("{stat}_abs_dm_{side}_std"));
        }
    }
    header.extend(["median_K_mean", "median_K_std", "frac_K_pos_mean", "frac_K_pos_std"].map(String::from));
    w.write_record(&header)?;
    for r in results {
        let mut row = vec![
            r.q2.to_string(),
            r.hidden_width.to_string(),
            r.n_realizations.to_string(),
            r.k.mean.to_string(),
            r.k.std.to_string(),
        ];
        for s in [&r.abs_dm_before, &r.abs_dm_after] {
            for ms in [s.max, s.median, s.mean] {
                row.push(ms.mean.to_string());
                row.push(ms.std.to_string());
            }
        }
        for ms in [r.median_k, r.fraction_k_positive] {
            row.push(ms.mean.to_string());
            row.push(ms.std.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per cell.
pub fn write_sweep_cells_csv<T: Real, W: Write>(cells: &[CellResult<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "q2",
        "width",
        "realization",
        "mean_k",
        "median_k",
        "fraction_k_positive",
        "n_undefined",
        "max_abs_dm_before",
        "median_abs_dm_before",
        "mean_abs_dm_before",
        "max_abs_dm_after",
        "median_abs_dm_after",
        "mean_abs_dm_after",
        "best_epoch",
        "best_val_loss",
    ])?;
    for c in cells {
        w.write_record([
            c.q2.to_string(),
            c.key.width.to_string(),
            c.key.realization.to_string(),
            opt(c.mean_k),
            opt(c.median_k),
            c.fraction_k_positive.to_string(),
            c.n_undefined.to_string(),
            c.abs_dm_before.max.to_string(),
            c.abs_dm_before.median.to_string(),
            c.abs_dm_before.mean.to_string(),
            c.abs_dm_after.max.to_string(),
            c.abs_dm_after.median.to_string(),
            c.abs_dm_after.mean.to_string(),
            c.best_epoch.to_string(),
            c.best_val_loss.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Dataset files: line-delimited JSON. The first line is a header object with
//! the generation config; every following line is one record.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{DataRecord, DatasetConfig, EchoDataset, Engine};
use crate::{Error, Real, Result};

pub const DATASET_FORMAT: &str = "echo-mitigation-dataset/1";

#[derive(Serialize, Deserialize)]
struct Header<T> {
    format: String,
    n_records: usize,
    engine: Engine,
    config: DatasetConfig<T>,
}

pub fn write_dataset<T: Real, W: Write>(ds: &EchoDataset<T>, mut out: W) -> Result<()> {
    let header = Header {
        format: DATASET_FORMAT.to_string(),
        n_records: ds.records.len(),
        engine: ds.engine,
        config: ds.config.clone(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for r in &ds.records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset<T: Real, R: BufRead>(input: R) -> Result<EchoDataset<T>> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Format("empty dataset file".into()))??;
    let header: Header<T> =
        serde_json::from_str(&first).map_err(|e| Error::Format(format!("header: {e}")))?;
    if header.format != DATASET_FORMAT {
        return Err(Error::Format(format!("unknown dataset format {:?}", header.format)));
    }
    let mut records = Vec::with_capacity(header.n_records);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: DataRecord<T> = serde_json::from_str(&line)
            .map_err(|e| Error::Format(format!("line {}: {e}", i + 2)))?;
        records.push(r);
    }
    if records.len() != header.n_records {
        return Err(Error::Format(format!(
            "header announces {} records, file has {}",
            header.n_records,
            records.len()
        )));
    }
    let ds = EchoDataset {
        config: header.config,
        engine: header.engine,
        records,
    };
    ds.validate()?;
    Ok(ds)
}

/// Same columns as the record lines, flattened: `m_ideal_0 .. m_ideal_{n-1}`,
/// then noisy, then exact (left empty for echo records).
pub fn write_dataset_csv<T: Real, W: Write>(ds: &EchoDataset<T>, out: W) -> Result<()> {
    let n = ds.records.first().map_or(0, |r| r.m_ideal.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["mode", "state_id", "prep_seed", "time_index", "t"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for prefix in ["m_ideal", "m_noisy", "m_exact"] {
        header.extend((0..n).map(|j| format!("{prefix}_{j}")));
    }
    w.write_record(&header)?;
    for r in &ds.records {
        let mut row = vec![
            r.mode.as_str().to_string(),
            r.state_id.to_string(),
            r.prep_seed.to_string(),
            r.time_index.to_string(),
            r.t.to_string(),
        ];
        row.extend(r.m_ideal.iter().map(|v| v.to_string()));
        row.extend(r.m_noisy.iter().map(|v| v.to_string()));
        match &r.m_exact {
            Some(m) => row.extend(m.iter().map(|v| v.to_string())),
            None => row.extend((0..n).map(|_| String::new())),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

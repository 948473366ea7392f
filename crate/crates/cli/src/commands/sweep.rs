//! Width sweep with one cache file per cell.
//!
//! Layout under `--out`:
//! `data/q2_<i>.jsonl` holds the dataset of noise level `i`,
//! `cells/q<i>_w<width>_r<realization>.json` one finished cell, and
//! `sweep_stats.csv`, `sweep_cells.csv`, `sweep.json` the merged results.
//! Each cache file carries a fingerprint of everything its result depends on;
//! unreadable or stale files are recomputed.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::Args;
use echo_mitigation::datagen::{generate_echo_dataset, DatasetConfig, EchoConfig, EchoDataset};
use echo_mitigation::metrics::{
    aggregate_sweep, run_sweep_cell, write_sweep_cells_csv, write_sweep_stats_csv, CellKey, CellResult, SweepConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{config_json, load_config, ConfigArgs};
use crate::error::CliError;
use crate::files::{load_dataset, prepare_outputs, save_dataset, sha256_bytes, write_atomic, write_json, write_with};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Realizations per (noise level, width), overriding `sweep.n_realizations`.
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Overwrite merged results from an earlier run. Cached cells are reused either way.
    #[arg(long)]
    pub force: bool,
}

#[derive(Serialize, Deserialize)]
struct CachedCell {
    fingerprint: String,
    result: CellResult<f64>,
}

/// Hash of the dataset config, subset sizes and training settings of one noise level.
fn fingerprint(echo: &EchoConfig<f64>, sweep: &SweepConfig<f64>) -> String {
    let key = serde_json::json!({
        "echo": echo,
        "n_train": sweep.n_train,
        "n_val": sweep.n_val,
        "n_test": sweep.n_test,
        "subset_seed": sweep.subset_seed,
        "train": sweep.train,
    });
    sha256_bytes(key.to_string().as_bytes())
}

fn cell_path(dir: &Path, key: CellKey) -> PathBuf {
    dir.join(format!("q{}_w{}_r{}.json", key.q2_index, key.width, key.realization))
}

fn load_cell(path: &Path, key: CellKey, fingerprint: &str) -> Option<CellResult<f64>> {
    if !path.exists() {
        return None;
    }
    let parsed = std::fs::read(path)
        .ok()
        .and_then(|bytes| serde_json::from_slice::<CachedCell>(&bytes).ok());
    match parsed {
        Some(c) if c.fingerprint == fingerprint && c.result.key == key => Some(c.result),
        Some(_) => {
            log::warn!("{} was computed with different settings; recomputing", path.display());
            None
        }
        None => {
            log::warn!("{} is unreadable; recomputing", path.display());
            None
        }
    }
}

fn level_dataset(path: &Path, echo: &EchoConfig<f64>) -> Result<EchoDataset<f64>, CliError> {
    if path.exists() {
        match load_dataset(path) {
            Ok(ds) if ds.config == DatasetConfig::Echo(echo.clone()) => return Ok(ds),
            Ok(_) => log::warn!("{} was generated with different settings; regenerating", path.display()),
            Err(e) => log::warn!("{e}; regenerating"),
        }
    }
    let ds = generate_echo_dataset(echo)?;
    save_dataset(path, &ds)?;
    Ok(ds)
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.common)?;
    if let Some(n) = args.realizations {
        cfg.sweep.n_realizations = n;
    }
    cfg.validate()?;
    let sweep = cfg.sweep_config();
    let base = cfg.echo_config()?;
    let paths = prepare_outputs(&args.out, &["sweep_stats.csv", "sweep_cells.csv", "sweep.json"], args.force)?;
    let data_dir = args.out.join("data");
    let cell_dir = args.out.join("cells");
    for d in [&data_dir, &cell_dir] {
        std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
    }

    let mut datasets = Vec::with_capacity(sweep.q2_levels.len());
    let mut fingerprints = Vec::with_capacity(sweep.q2_levels.len());
    for (i, &q2) in sweep.q2_levels.iter().enumerate() {
        let mut echo = base.clone();
        echo.noise.q2 = q2;
        let ds = level_dataset(&data_dir.join(format!("q2_{i}.jsonl")), &echo)?;
        log::info!("q2 = {q2}: {} records", ds.len());
        fingerprints.push(fingerprint(&echo, &sweep));
        datasets.push(ds.records);
    }

    let keys = sweep.cells();
    let total = keys.len();
    let done = AtomicUsize::new(0);
    let reused = AtomicUsize::new(0);
    let cells = keys
        .into_par_iter()
        .map(|key| {
            let path = cell_path(&cell_dir, key);
            let fp = &fingerprints[key.q2_index];
            let result = match load_cell(&path, key, fp) {
                Some(r) => {
                    reused.fetch_add(1, Ordering::Relaxed);
                    r
                }
                None => {
                    let r = run_sweep_cell(&datasets[key.q2_index], sweep.q2_levels[key.q2_index], key, &sweep)?;
                    let cached = CachedCell {
                        fingerprint: fp.clone(),
                        result: r.clone(),
                    };
                    write_atomic(&path, serde_json::to_string(&cached).expect("serializable").as_bytes())?;
                    r
                }
            };
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if n.is_multiple_of(10) || n == total {
                log::info!("{n}/{total} cells");
            }
            Ok(result)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let results = aggregate_sweep(&sweep, &cells)?;

    write_with(&paths[0], |w| write_sweep_stats_csv(&results, w))?;
    write_with(&paths[1], |w| write_sweep_cells_csv(&cells, w))?;
    let mut meta = config_json(&cfg);
    meta["fingerprints"] = serde_json::to_value(&fingerprints).expect("serializable");
    meta["results"] = serde_json::to_value(&results).expect("serializable");
    write_json(&paths[2], &meta)?;
    println!(
        "{} cells ({} from cache), {} aggregate rows -> {}",
        total,
        reused.into_inner(),
        results.len(),
        paths[0].display()
    );
    for r in &results {
        println!(
            "q2 {:<6} width {:<4} K {:>10.4} +- {:<10.4} median K {:.4} mean |dM| after {:.5}",
            r.q2, r.hidden_width, r.k.mean, r.k.std, r.median_k.mean, r.abs_dm_after.mean.mean
        );
    }
    Ok(())
}

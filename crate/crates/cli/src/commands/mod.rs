pub mod eval;
pub mod generate;
pub mod inspect;
pub mod sweep;
pub mod train;

use std::path::PathBuf;

use clap::Args;
use echo_mitigation::datagen::Measurement;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Flags shared by every command that reads a config.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Experiment config (TOML). Paper defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample this many shots per record instead of exact expectations.
    #[arg(long)]
    pub shots: Option<u32>,
}

pub fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(shots) = args.shots {
        cfg.measurement = Measurement::Shots { shots };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Comment line listing the resolved seeds, prepended to written configs.
pub fn provenance_line(cfg: &ExperimentConfig) -> String {
    let s = cfg.seeds();
    format!(
        "# seeds: master={} data={} split={} init={} shuffle={} subset={}",
        s.master, s.data, s.split, s.init, s.shuffle, s.subset
    )
}

/// Config and seeds as JSON, for embedding in output files.
pub fn config_json(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::json!({
        "config": cfg,
        "seeds": cfg.seeds(),
    })
}

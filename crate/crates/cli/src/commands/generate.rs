use std::path::PathBuf;

use clap::Args;
use echo_mitigation::datagen::{generate_echo_dataset, generate_forward_testset, write_dataset_csv};

use super::{load_config, provenance_line, ConfigArgs};
use crate::error::CliError;
use crate::files::{prepare_outputs, save_dataset, write_with};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of prepared states, overriding `echo.n_states`.
    #[arg(long)]
    pub states: Option<usize>,
    /// Comma-separated echo times, overriding `echo.time_points`.
    #[arg(long, value_delimiter = ',')]
    pub time_points: Option<Vec<f64>>,
    /// Skip the forward test set even if the config enables it.
    #[arg(long)]
    pub no_forward: bool,
    /// Also write CSV copies of the datasets.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub force: bool,
}

pub fn run(args: &GenerateArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.common)?;
    if let Some(n) = args.states {
        cfg.echo.n_states = n;
    }
    if let Some(t) = &args.time_points {
        cfg.echo.time_points = t.clone();
    }
    if args.no_forward {
        cfg.forward.enabled = false;
    }
    cfg.validate()?;

    let mut names = vec!["echo.jsonl", "config.toml"];
    if cfg.forward.enabled {
        names.push("forward.jsonl");
    }
    if args.csv {
        names.push("echo.csv");
        if cfg.forward.enabled {
            names.push("forward.csv");
        }
    }
    prepare_outputs(&args.out, &names, args.force)?;

    let echo = generate_echo_dataset(&cfg.echo_config()?)?;
    save_dataset(&args.out.join("echo.jsonl"), &echo)?;
    if args.csv {
        write_with(&args.out.join("echo.csv"), |w| write_dataset_csv(&echo, w))?;
    }
    println!("echo: {} records -> {}", echo.len(), args.out.join("echo.jsonl").display());

    if cfg.forward.enabled {
        let forward = generate_forward_testset(&cfg.forward_config()?)?;
        save_dataset(&args.out.join("forward.jsonl"), &forward)?;
        if args.csv {
            write_with(&args.out.join("forward.csv"), |w| write_dataset_csv(&forward, w))?;
        }
        println!("forward: {} records -> {}", forward.len(), args.out.join("forward.jsonl").display());
    }

    let config_path = args.out.join("config.toml");
    let text = format!("{}\n{}", provenance_line(&cfg), cfg.to_toml());
    std::fs::write(&config_path, text).map_err(|e| CliError::io(&config_path, e))?;
    Ok(())
}

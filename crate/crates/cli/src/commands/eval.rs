use std::path::PathBuf;

use clap::{Args, ValueEnum};
use echo_mitigation::datagen::{split_dataset, DataRecord, Mode, SplitSpec};
use echo_mitigation::metrics::{
    evaluate_echo_testset, evaluate_forward, write_k_per_state_csv, write_k_sorted_csv, write_records_csv,
    write_trajectories_csv, CorrectionReport,
};

use super::{load_config, ConfigArgs};
use crate::error::CliError;
use crate::files::{load_dataset, load_model, prepare_outputs, write_json, write_with, InputRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    /// Hold-out split of the echo dataset the model was trained on.
    EchoTest,
    /// Forward-in-time test set.
    Forward,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum)]
    pub mode: EvalMode,
    #[arg(long)]
    pub out: PathBuf,
    /// Split to use in echo-test mode when the model file does not record one.
    #[command(flatten)]
    pub common: ConfigArgs,
    #[arg(long)]
    pub force: bool,
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    let mut names = vec!["records.csv", "k_sorted.csv", "trajectories.csv", "summary.json"];
    if args.mode == EvalMode::Forward {
        names.push("k_per_state.csv");
    }
    let paths = prepare_outputs(&args.out, &names, args.force)?;
    let model_file = load_model(&args.model)?;
    let ds = load_dataset(&args.dataset)?;
    let dataset_ref = InputRef::of(&args.dataset)?;
    let want = match args.mode {
        EvalMode::EchoTest => Mode::Echo,
        EvalMode::Forward => Mode::Forward,
    };
    if ds.records.iter().any(|r| r.mode != want) {
        return Err(CliError::Invalid(format!(
            "{} does not hold {} records",
            args.dataset.display(),
            want.as_str()
        )));
    }
    let model = &model_file.model;

    let mut summary = serde_json::json!({
        "mode": want.as_str(),
        "model": InputRef::of(&args.model)?,
        "dataset": dataset_ref,
    });
    let (records, report): (Vec<DataRecord<f64>>, CorrectionReport<f64>) = match args.mode {
        EvalMode::EchoTest => {
            let spec = split_for(args, &model_file.provenance)?;
            if let Some(trained_on) = model_file.provenance.get("dataset").and_then(|d| d.get("sha256")) {
                if trained_on.as_str() != Some(summary["dataset"]["sha256"].as_str().unwrap_or_default()) {
                    log::warn!("{} differs from the dataset the model was trained on", args.dataset.display());
                }
            }
            let test = split_dataset(&ds.records, &spec)?.test;
            let report = evaluate_echo_testset(model, &test)?;
            summary["split"] = serde_json::to_value(spec).expect("serializable");
            (test, report)
        }
        EvalMode::Forward => {
            let fr = evaluate_forward(model, &ds.records)?;
            write_with(&paths[4], |w| write_k_per_state_csv(&fr, w))?;
            summary["forward"] = serde_json::json!({
                "n_states": fr.per_state.len(),
                "fraction_states_k_positive": fr.fraction_states_k_positive,
                "mean_state_k": fr.mean_state_k,
                "mean_state_k_single_spin": fr.mean_state_k_single_spin,
            });
            println!(
                "states with mean K > 0: {}/{} ({:.4})",
                fr.per_state.iter().filter(|s| s.mean_k.is_some_and(|k| k > 0.0)).count(),
                fr.per_state.len(),
                fr.fraction_states_k_positive
            );
            (ds.records, fr.report)
        }
    };
    write_with(&paths[0], |w| write_records_csv(&report, w))?;
    write_with(&paths[1], |w| write_k_sorted_csv(&report, w))?;
    write_with(&paths[2], |w| write_trajectories_csv(&records, &report, w))?;
    let s = &report.summary;
    summary["summary"] = serde_json::to_value(s).expect("serializable");
    write_json(&paths[3], &summary)?;
    println!(
        "records {} | fraction K>0 {:.4} | mean K {} | median K {} | mean |dM| before {:.6} after {:.6}",
        s.n_records,
        s.fraction_k_positive,
        s.mean_k.map_or("undefined".into(), |k| format!("{k:.4}")),
        s.median_k.map_or("undefined".into(), |k| format!("{k:.4}")),
        s.abs_dm_before.mean,
        s.abs_dm_after.mean
    );
    Ok(())
}

/// The split recorded by `train`, else the one from `--config`.
fn split_for(args: &EvalArgs, provenance: &serde_json::Value) -> Result<SplitSpec, CliError> {
    if let Some(split) = provenance.get("split") {
        return serde_json::from_value(split.clone()).map_err(|e| CliError::Format {
            path: args.model.display().to_string(),
            msg: format!("provenance.split: {e}"),
        });
    }
    if args.common.config.is_none() {
        log::warn!("model file records no split; using the split from the default config");
    }
    Ok(load_config(&args.common)?.split_spec())
}

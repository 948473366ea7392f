use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use echo_mitigation::datagen::{split_dataset, Mode};
use echo_mitigation::neuralnet::{examples_from_records, init_model, train, write_model, ModelFile};

use super::{config_json, load_config, ConfigArgs};
use crate::error::CliError;
use crate::files::{load_dataset, prepare_outputs, write_with, InputRef};

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    /// Echo dataset written by `generate`.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for `model.json` and `history.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Hidden-layer width, overriding `train.width`.
    #[arg(long)]
    pub width: Option<usize>,
    /// Epoch count, overriding `train.epochs`.
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

pub fn run(args: &TrainArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.common)?;
    if let Some(w) = args.width {
        cfg.train.width = w;
    }
    if let Some(e) = args.epochs {
        cfg.train.epochs = e;
    }
    cfg.validate()?;
    let paths = prepare_outputs(&args.out, &["model.json", "history.csv"], args.force)?;

    let ds = load_dataset(&args.dataset)?;
    if ds.records.iter().any(|r| r.mode != Mode::Echo) {
        return Err(CliError::Invalid(format!(
            "{}: training needs an echo dataset",
            args.dataset.display()
        )));
    }
    let spec = cfg.split_spec();
    let split = split_dataset(&ds.records, &spec)?;
    let train_cfg = cfg.train_config();
    let model = init_model(cfg.train.width, train_cfg.init_seed)?;
    let (best, history) = train(
        model,
        &examples_from_records(&split.train),
        &examples_from_records(&split.val),
        &train_cfg,
    )?;

    let mut file = ModelFile::new(best, train_cfg, history.clone());
    let mut provenance = config_json(&cfg);
    provenance["split"] = serde_json::to_value(spec).expect("serializable");
    provenance["dataset"] = serde_json::to_value(InputRef::of(&args.dataset)?).expect("serializable");
    file.provenance = provenance;
    write_with(&paths[0], |w| write_model(&file, w))?;
    write_with(&paths[1], |w| {
        writeln!(w, "epoch,train_loss,val_loss")?;
        for e in &history.epochs {
            writeln!(w, "{},{},{}", e.epoch, e.train_loss, e.val_loss)?;
        }
        Ok(())
    })?;
    println!(
        "trained 6-{}-6 ({} parameters) on {} records; best epoch {} with validation loss {:.6e}",
        cfg.train.width,
        file.model.n_params(),
        split.train.len(),
        history.best_epoch,
        history.best_val_loss
    );
    println!("model -> {}", paths[0].display());
    Ok(())
}

//! Model files: a single JSON document. Floats are written in shortest
//! round-trip form, so reading a file back gives bit-identical parameters.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{MlpModel, TrainConfig, TrainHistory};
use crate::{Error, Real, Result};

pub const MODEL_FORMAT: &str = "echo-mitigation-model/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile<T> {
    pub format: String,
    pub model: MlpModel<T>,
    pub train_config: TrainConfig<T>,
    /// Best epoch and the loss history of the run that produced the model.
    pub history: TrainHistory<T>,
    /// Free-form provenance supplied by the caller (config snapshot, input hashes).
    #[serde(default)]
    pub provenance: serde_json::Value,
}

impl<T: Real> ModelFile<T> {
    pub fn new(model: MlpModel<T>, train_config: TrainConfig<T>, history: TrainHistory<T>) -> Self {
        Self {
            format: MODEL_FORMAT.to_string(),
            model,
            train_config,
            history,
            provenance: serde_json::Value::Null,
        }
    }
}

pub fn write_model<T: Real, W: Write>(file: &ModelFile<T>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, file)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_model<T: Real, R: Read>(input: R) -> Result<ModelFile<T>> {
    let file: ModelFile<T> = serde_json::from_reader(input)?;
    if file.format != MODEL_FORMAT {
        return Err(Error::Format(format!("unknown model format {:?}", file.format)));
    }
    file.model.validate()?;
    Ok(file)
}

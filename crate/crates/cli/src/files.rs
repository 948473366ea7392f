//! Output directories, overwrite protection and input fingerprints.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use echo_mitigation::datagen::{read_dataset, write_dataset, EchoDataset};
use echo_mitigation::neuralnet::{read_model, ModelFile};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Creates `dir` and refuses to continue if any of `names` already exists in it.
pub fn prepare_outputs(dir: &Path, names: &[&str], force: bool) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let paths: Vec<PathBuf> = names.iter().map(|n| dir.join(n)).collect();
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(CliError::Exists(p.display().to_string()));
        }
    }
    Ok(paths)
}

/// Writes through a buffered file, mapping I/O errors to the path.
pub fn write_with<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> echo_mitigation::Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| match e {
        echo_mitigation::Error::Io(source) => CliError::io(path, source),
        other => CliError::from(other),
    })?;
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes to a sibling temporary file, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// File name and content hash; the directory is left out so that runs in
/// different directories produce identical outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct InputRef {
    pub file: String,
    pub sha256: String,
}

impl InputRef {
    pub fn of(path: &Path) -> Result<Self, CliError> {
        Ok(Self {
            file: path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
            sha256: sha256_file(path)?,
        })
    }
}

pub fn load_dataset(path: &Path) -> Result<EchoDataset<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let ds = read_dataset(BufReader::new(file)).map_err(|e| CliError::reading(path, e))?;
    ds.validate().map_err(|e| CliError::reading(path, e))?;
    Ok(ds)
}

pub fn save_dataset(path: &Path, ds: &EchoDataset<f64>) -> Result<(), CliError> {
    write_with(path, |w| write_dataset(ds, w))
}

pub fn load_model(path: &Path) -> Result<ModelFile<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_model(BufReader::new(file)).map_err(|e| CliError::reading(path, e))
}

//! Run manifests: what a command read and wrote, with content hashes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// Hash of the compact JSON serialization of `config`.
pub fn config_hash(config: &impl Serialize) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(config)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub version: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    /// Input path as given on the command line, to its sha256.
    pub inputs: BTreeMap<String, String>,
    /// Output path relative to the manifest directory, to its sha256.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, seed: u64, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command: command.into(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config)?,
            config_hash: config_hash(config)?,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.inputs.insert(path.display().to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Records `path`, keyed relative to `base` when it lies inside it.
    pub fn add_output(&mut self, base: &Path, path: &Path) -> Result<()> {
        let key = path.strip_prefix(base).unwrap_or(path);
        self.outputs.insert(slash_path(key), sha256_file(path)?);
        Ok(())
    }

    /// Records every file under `dir` except the manifest itself.
    pub fn add_output_dir(&mut self, dir: &Path) -> Result<()> {
        for file in files_under(dir)? {
            if file.strip_prefix(dir).map(|p| p != Path::new(MANIFEST_FILE)).unwrap_or(true) {
                self.add_output(dir, &file)?;
            }
        }
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

fn slash_path(p: &Path) -> String {
    p.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// All regular files below `dir`, sorted.
pub fn files_under(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

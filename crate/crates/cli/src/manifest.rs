use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

/// Record of one invocation, written as `<subcommand>.run.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

pub struct Run {
    subcommand: String,
    started: Instant,
    config: serde_json::Value,
    inputs: Vec<InputDigest>,
    outputs: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Run {
    pub fn start(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.into(),
            started: Instant::now(),
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn config<T: Serialize>(&mut self, config: &T) -> Result<(), CliError> {
        self.config = serde_json::to_value(config).map_err(spectral_forge::Error::from)?;
        Ok(())
    }

    pub fn input_bytes(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest { name: name.into(), sha256: sha256_hex(bytes) });
    }

    pub fn input_file(&mut self, path: &Path) -> Result<(), CliError> {
        let bytes = fs::read(path).map_err(spectral_forge::Error::from)?;
        self.input_bytes(&path.display().to_string(), &bytes);
        Ok(())
    }

    pub fn output(&mut self, path: PathBuf) {
        self.outputs.push(path);
    }

    pub fn outputs(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.outputs.extend(paths);
    }

    /// Writes the manifest into `dir` after checking every output exists.
    pub fn finish(self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{}.run.json", self.subcommand));
        let mut outputs: Vec<String> = Vec::with_capacity(self.outputs.len() + 1);
        for p in &self.outputs {
            if !p.exists() {
                return Err(CliError::Core(spectral_forge::Error::Domain(format!(
                    "output {} was not written",
                    p.display()
                ))));
            }
            outputs.push(p.display().to_string());
        }
        outputs.push(path.display().to_string());
        let manifest = RunManifest {
            subcommand: self.subcommand,
            config: self.config,
            inputs: self.inputs,
            outputs,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(spectral_forge::Error::from)?;
        fs::write(&path, text + "\n").map_err(spectral_forge::Error::from)?;
        Ok(path)
    }
}

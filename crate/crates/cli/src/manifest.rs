//! Run manifests: every input and output file with its digest, plus the
//! parsed parameters. No timestamps, so identical runs give identical files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl FileDigest {
    fn of(path: &Path, data: &[u8]) -> Self {
        FileDigest {
            path: path.display().to_string(),
            bytes: data.len() as u64,
            sha256: hex::encode(Sha256::digest(data)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Tracks file traffic for one subcommand run.
pub struct Run {
    pub out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn new(out_dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out_dir).map_err(|source| CliError::Write {
            path: out_dir.to_owned(),
            source,
        })?;
        Ok(Run {
            out_dir: out_dir.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let data = std::fs::read(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        self.inputs.push(FileDigest::of(path, &data));
        Ok(data)
    }

    pub fn write(&mut self, name: &str, data: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, data).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        self.outputs.push(FileDigest::of(&path, data));
        Ok(path)
    }

    pub fn output_paths(&self) -> Vec<String> {
        self.outputs.iter().map(|o| o.path.clone()).collect()
    }

    /// Writes `<subcommand>.manifest.json`; call after every other output.
    pub fn finish(self, subcommand: &str, parameters: serde_json::Value) -> Result<(), CliError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: moodcast::VERSION,
            subcommand: subcommand.to_owned(),
            parameters,
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let path = self.out_dir.join(format!("{subcommand}.manifest.json"));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|source| CliError::Write { path, source })
    }
}

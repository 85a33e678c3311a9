//! Run manifests: what was run, with which parameters, and what it wrote.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp: String,
    pub input_hashes: BTreeMap<String, String>,
    pub output_files: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files for one command run.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    manifest: RunManifest,
}

impl RunWriter {
    pub fn new(dir: &Path, command: &str, parameters: BTreeMap<String, String>) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                parameters,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                input_hashes: BTreeMap::new(),
                output_files: Vec::new(),
            },
        })
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.manifest.input_hashes.insert(name.to_string(), sha256_hex(bytes));
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.manifest.output_files.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn finish(self) -> std::io::Result<RunManifest> {
        let mut text = serde_json::to_string_pretty(&self.manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(self.dir.join(MANIFEST_NAME), text)?;
        Ok(self.manifest)
    }
}

/// Files listed in `manifest` whose content no longer matches its hash.
pub fn verify(dir: &Path, manifest: &RunManifest) -> Vec<String> {
    manifest
        .output_files
        .iter()
        .filter(|f| match std::fs::read(dir.join(&f.path)) {
            Ok(b) => sha256_hex(&b) != f.sha256 || b.len() as u64 != f.bytes,
            Err(_) => true,
        })
        .map(|f| f.path.clone())
        .collect()
}

//! Sidecar manifests recording how an output file was produced.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct InstanceHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub tool_version: &'static str,
    pub recipe_version: u32,
    pub seed: Option<u64>,
    pub instances: Vec<InstanceHash>,
    pub outputs: Vec<String>,
    pub wall_time_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write(out: &Path, manifest: &RunManifest) -> CliResult<()> {
    let path = manifest_path(out);
    let body = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    std::fs::write(&path, body).map_err(|e| CliError::io(path.display(), e))
}

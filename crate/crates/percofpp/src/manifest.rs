//! Run directories and their manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Every resolved configuration key.
    pub config: BTreeMap<String, String>,
    pub master_seed: u64,
    pub replica_seeds: Vec<u64>,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed manifest: {e}")))
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Files whose on-disk digest differs from the recorded one.
    pub fn verify(&self, dir: &Path) -> CliResult<Vec<String>> {
        let mut bad = Vec::new();
        for o in &self.outputs {
            let bytes = std::fs::read(dir.join(&o.file))?;
            if sha256_hex(&bytes) != o.sha256 {
                bad.push(o.file.clone());
            }
        }
        Ok(bad)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn timestamp() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
}

/// Creates `<root>/<subcommand>-<seed>-<timestamp>`, adding a counter when
/// the name is taken.
pub fn create_run_dir(root: &Path, subcommand: &str, seed: u64) -> CliResult<PathBuf> {
    std::fs::create_dir_all(root)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%3fZ");
    let base = format!("{subcommand}-{seed}-{stamp}");
    for k in 0.. {
        let name = if k == 0 { base.clone() } else { format!("{base}-{k}") };
        let dir = root.join(name);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!("the counter is unbounded")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn run_dirs_do_not_collide() {
        let root = tempfile::tempdir().unwrap();
        let a = create_run_dir(root.path(), "mu", 7).unwrap();
        let b = create_run_dir(root.path(), "mu", 7).unwrap();
        assert_ne!(a, b);
        assert!(a.file_name().unwrap().to_str().unwrap().starts_with("mu-7-"));
    }
}

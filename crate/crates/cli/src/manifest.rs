use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the binary name, without `--out` and `--threads`.
    pub args: Vec<String>,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    pub grids: serde_json::Value,
    pub tool_version: String,
    pub rng: String,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files of one run; every write goes through here so the
/// manifest sees each digest.
pub struct OutputDir {
    dir: PathBuf,
    outputs: Vec<OutputDigest>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), outputs: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.push(OutputDigest { file: name.into(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn finish(self, mut manifest: RunManifest) -> std::io::Result<RunManifest> {
        manifest.outputs = self.outputs;
        let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        fs::write(self.dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(manifest)
    }
}

/// Drops `--out`/`--threads` and their values so the arguments can be replayed
/// into another directory.
pub fn replayable_args(args: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--out" || a == "--threads" {
            it.next();
        } else if a.starts_with("--out=") || a.starts_with("--threads=") {
        } else {
            out.push(a.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_output_and_thread_flags() {
        let args: Vec<String> =
            ["tau", "--out", "x", "--mode", "closed", "--threads=3", "--j", "4"].iter().map(|s| s.to_string()).collect();
        assert_eq!(replayable_args(&args), ["tau", "--mode", "closed", "--j", "4"]);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}

//! Atomic artifact writes and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::hex;

pub struct ArtifactWriter {
    dir: PathBuf,
    digests: BTreeMap<String, String>,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub name: &'a str,
    pub task: &'a str,
    pub tool_version: &'a str,
    pub config_sha256: &'a str,
    pub seed: u64,
    pub wall_time_s: f64,
    /// file name → sha256 of its contents
    pub files: &'a BTreeMap<String, String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), digests: BTreeMap::new() })
    }

    /// Writes to a hidden temporary file in the same directory, then renames.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.digests.insert(name.to_string(), hex(&Sha256::digest(bytes)));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes manifest.json covering every file written so far.
    pub fn finish(self, name: &str, task: &str, config_sha256: &str, seed: u64, wall_time_s: f64) -> Result<PathBuf> {
        let m = Manifest {
            name,
            task,
            tool_version: env!("CARGO_PKG_VERSION"),
            config_sha256,
            seed,
            wall_time_s,
            files: &self.digests,
        };
        let mut text = serde_json::to_string_pretty(&m)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("artifact");
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))?;
    Ok(())
}

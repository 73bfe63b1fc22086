use rcslab::Result;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Record of one invocation, written next to its output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub wall_clock_secs: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> Result<()> {
        std::fs::write(manifest_path(out), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

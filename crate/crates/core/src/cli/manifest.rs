use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::ctree::SCHEME_VERSION;
use crate::error::Result;

/// SHA-256 of a file, or of every file in a directory (sorted by name).
pub fn hash_path(path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut names: Vec<PathBuf> = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        names.retain(|p| p.is_file());
        names.sort();
        for p in names {
            h.update(p.file_name().unwrap_or_default().to_string_lossy().as_bytes());
            h.update([0]);
            h.update(fs::read(&p)?);
        }
    } else {
        h.update(fs::read(path)?);
    }
    Ok(hex::encode(h.finalize()))
}

/// Run record written next to every command's output.
pub struct Manifest {
    command: &'static str,
    argv: Vec<String>,
    started: Instant,
    inputs: Vec<Value>,
    outputs: Vec<Value>,
    config: Value,
}

impl Manifest {
    pub fn start(command: &'static str, argv: &[String]) -> Self {
        Manifest {
            command,
            argv: argv.to_vec(),
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(json!({
            "path": path.display().to_string(),
            "sha256": hash_path(path)?,
        }));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(json!({
            "path": path.display().to_string(),
            "sha256": hash_path(path)?,
        }));
        Ok(())
    }

    pub fn config(&mut self, config: Value) {
        self.config = config;
    }

    pub fn write(self, path: &Path) -> Result<()> {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let doc = json!({
            "argv": self.argv,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "scheme_version": SCHEME_VERSION,
            "timestamp_unix": now,
            "wall_clock_seconds": self.started.elapsed().as_secs_f64(),
        });
        fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
        Ok(())
    }
}

/// `out.json` -> `out.json.manifest.json`.
pub fn beside(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

//! CSV formatting, atomic file writes and run manifests.

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV document in memory so it can be written atomically.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

/// Writes through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub tol: Option<f64>,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputRecord>,
}

/// Collects the files of one run, then writes them and the manifest.
pub struct Run {
    command: String,
    seed: u64,
    tol: Option<f64>,
    force: bool,
    start: Instant,
    started_unix: u64,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Run {
    pub fn new(command: &str, seed: u64, tol: Option<f64>, force: bool) -> Self {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { command: command.to_string(), seed, tol, force, start: Instant::now(), started_unix, files: Vec::new() }
    }

    pub fn add(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    /// Refuses to overwrite anything unless `--force` was given; nothing is
    /// written when any target exists.
    pub fn finish(self, manifest_path: &Path, parameters: serde_json::Value) -> Result<RunManifest> {
        if !self.force {
            for path in self.files.iter().map(|(p, _)| p.as_path()).chain([manifest_path]) {
                if path.exists() {
                    bail!(Collision(path.display().to_string()));
                }
            }
        }
        let base = manifest_path.parent().unwrap_or(Path::new(""));
        let mut outputs = Vec::with_capacity(self.files.len());
        for (path, bytes) in &self.files {
            write_atomic(path, bytes)?;
            let rel = path.strip_prefix(base).unwrap_or(path);
            outputs.push(OutputRecord {
                path: rel.display().to_string(),
                bytes: bytes.len(),
                sha256: hex(&Sha256::digest(bytes)),
            });
        }
        let manifest = RunManifest {
            tool: "sptchan",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            parameters,
            seed: self.seed,
            tol: self.tol,
            started_unix: self.started_unix,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        write_atomic(manifest_path, text.as_bytes())?;
        Ok(manifest)
    }
}

/// An output file already exists and `--force` was not given.
#[derive(Debug)]
pub struct Collision(pub String);

impl std::fmt::Display for Collision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} already exists (pass --force to overwrite)", self.0)
    }
}

impl std::error::Error for Collision {}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

//! Atomic file output and the per-run manifest.
//!
//! Every file goes through a temporary file in the run directory and is
//! renamed into place. `manifest.json` is written last, so a directory
//! without one holds an incomplete run.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const OUT_DIR_ENV: &str = "LINDTOP_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "lindtop-out";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `--out`, else `$LINDTOP_OUT_DIR`, else `./lindtop-out`.
pub fn base_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// A sweep point whose computation failed.
#[derive(Clone, Debug, Serialize)]
pub struct PointFailure {
    pub index: usize,
    pub coordinates: Vec<f64>,
    pub error: String,
}

pub struct RunWriter {
    dir: PathBuf,
    files: Vec<FileRecord>,
    stages: Vec<(String, f64)>,
    started: Instant,
}

impl RunWriter {
    pub fn create(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        // a stale manifest would vouch for the files about to be replaced
        let manifest = dir.join(MANIFEST);
        if manifest.exists() {
            std::fs::remove_file(&manifest).map_err(|e| CliError::io(&manifest, e))?;
        }
        Ok(Self { dir, files: Vec::new(), stages: Vec::new(), started: Instant::now() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn persist(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
        tmp.persist(&target).map_err(|e| CliError::io(&target, e.error))?;
        Ok(())
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        self.persist(name, bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileRecord { name: name.into(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// Renders into memory with `f`, then writes atomically.
    pub fn write_with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> lindtop::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("output records serialize");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Records the wall time of a named stage since the previous one.
    pub fn stage(&mut self, name: &str) {
        let total = self.started.elapsed().as_secs_f64();
        let before: f64 = self.stages.iter().map(|s| s.1).sum();
        self.stages.push((name.into(), total - before));
    }

    pub fn finish(self, info: ManifestInfo) -> Result<PathBuf> {
        let inputs_text = serde_json::to_string(&info.inputs).expect("inputs serialize");
        let manifest = Manifest {
            tool: "lindtop",
            version: env!("CARGO_PKG_VERSION"),
            core_version: lindtop::VERSION,
            command: info.command,
            preset: info.preset,
            inputs_sha256: sha256_hex(inputs_text.as_bytes()),
            inputs: info.inputs,
            files: self.files.clone(),
            timings: Timings {
                total_seconds: self.started.elapsed().as_secs_f64(),
                stages: self.stages.iter().map(|(n, t)| StageTiming { name: n.clone(), seconds: *t }).collect(),
            },
            threads: info.threads,
            status: if info.failures.is_empty() { "complete" } else { "failed_points" },
            failures: info.failures,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        self.persist(MANIFEST, text.as_bytes())?;
        Ok(self.dir.join(MANIFEST))
    }
}

pub struct ManifestInfo {
    pub command: String,
    pub preset: Option<String>,
    pub inputs: serde_json::Value,
    pub threads: usize,
    pub failures: Vec<PointFailure>,
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: String,
    preset: Option<String>,
    inputs_sha256: String,
    inputs: serde_json::Value,
    files: Vec<FileRecord>,
    timings: Timings,
    threads: usize,
    status: &'static str,
    failures: Vec<PointFailure>,
}

#[derive(Serialize)]
struct Timings {
    total_seconds: f64,
    stages: Vec<StageTiming>,
}

#[derive(Serialize)]
struct StageTiming {
    name: String,
    seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn files_then_manifest() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("run");
        let mut w = RunWriter::create(dir.clone()).unwrap();
        w.write_bytes("a.csv", b"x\n1\n").unwrap();
        w.write_bytes("a.csv", b"x\n2\n").unwrap();
        assert!(!dir.join(MANIFEST).exists());
        let info = ManifestInfo {
            command: "test".into(),
            preset: None,
            inputs: serde_json::json!({"k": 1}),
            threads: 1,
            failures: vec![],
        };
        let path = w.finish(info).unwrap();
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(m["files"].as_array().unwrap().len(), 1);
        assert_eq!(m["files"][0]["sha256"], sha256_hex(b"x\n2\n"));
        assert_eq!(m["status"], "complete");
        assert_eq!(std::fs::read(dir.join("a.csv")).unwrap(), b"x\n2\n");
        // a new run in the same directory drops the old manifest first
        RunWriter::create(dir.clone()).unwrap();
        assert!(!dir.join(MANIFEST).exists());
    }
}

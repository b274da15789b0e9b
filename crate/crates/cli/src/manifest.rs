//! Run manifests: config echo, stream ids and output digests.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use levywalk::rng::stage_key;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const ARTIFACT: &str = "levywalk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Random stream family used by one stage: trajectory `i` draws from
/// `RngStream { seed: key, stream: i }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub stage: String,
    pub key: u64,
    pub trajectories: u64,
}

impl StreamRecord {
    pub fn new(seed: u64, stage: &str, trajectories: u64) -> Self {
        Self {
            stage: stage.into(),
            key: stage_key(seed, stage),
            trajectories,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// File name relative to the manifest's directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub threads: usize,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub streams: Vec<StreamRecord>,
    pub outputs: Vec<OutputDigest>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl RunManifest {
    /// `<dir>/<prefix>[_<tag>]_manifest.json`.
    pub fn manifest_path(config: &RunConfig, tag: Option<&str>) -> PathBuf {
        let stem = match tag {
            Some(t) => format!("{}_{t}", config.output.prefix),
            None => config.output.prefix.clone(),
        };
        config.output.dir.join(format!("{stem}_manifest.json"))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Other(format!("{}: not a run manifest: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    /// Re-hashes every listed output next to `manifest_path`.
    pub fn verify_outputs(&self, manifest_path: &Path) -> CliResult<Vec<PathBuf>> {
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        let mut missing = Vec::new();
        let mut found = Vec::new();
        for o in &self.outputs {
            let p = base.join(&o.file);
            if p.is_file() {
                found.push((p, o));
            } else {
                missing.push(p.display().to_string());
            }
        }
        if !missing.is_empty() {
            return Err(CliError::MissingInputs(missing));
        }
        found
            .into_iter()
            .map(|(p, o)| {
                let (actual, _) = digest_file(&p)?;
                if actual != o.sha256 {
                    return Err(CliError::Digest {
                        path: p,
                        expected: o.sha256.clone(),
                        actual,
                    });
                }
                Ok(p)
            })
            .collect()
    }
}

/// SHA-256 hex digest and size of a file.
pub fn digest_file(path: &Path) -> CliResult<(String, u64)> {
    let mut f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = f.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(h.finalize()), total))
}

/// Creates `name` in the output directory, hands a buffered writer to `f`,
/// and returns the digest record.
pub fn write_output(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> CliResult<OutputDigest> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&path, e))?;
    drop(w);
    let (sha256, bytes) = digest_file(&path)?;
    Ok(OutputDigest {
        file: name.into(),
        sha256,
        bytes,
    })
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

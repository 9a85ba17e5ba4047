//! Run manifests: what was run, on which inputs, producing which files.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: Value,
    /// Inputs with absolute paths.
    pub inputs: Vec<InputDigest>,
    /// SHA-256 over the per-input digests, in order.
    pub input_digest: String,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
    pub seed: Option<u64>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex::encode(h.finalize()))
}

fn combine(inputs: &[InputDigest]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update(i.sha256.as_bytes());
    }
    hex::encode(h.finalize())
}

impl RunManifest {
    pub fn new(
        command: Vec<String>,
        config: Value,
        inputs: &[&Path],
        outputs: Vec<PathBuf>,
        elapsed: Duration,
        seed: Option<u64>,
    ) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    sha256: sha256_file(p)?,
                    path: std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            command,
            config,
            input_digest: combine(&inputs),
            inputs,
            outputs,
            wall_clock_seconds: elapsed.as_secs_f64(),
            seed,
        })
    }

    /// True when every input still hashes to its recorded digest.
    pub fn verify(&self) -> Result<bool> {
        if combine(&self.inputs) != self.input_digest {
            return Ok(false);
        }
        for i in &self.inputs {
            if sha256_file(&i.path)? != i.sha256 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::io(path, e.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_detects_changes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.csv");
        std::fs::write(&p, "1,2\n").unwrap();
        let m = RunManifest::new(
            vec!["fit".into()],
            Value::Null,
            &[&p],
            vec![],
            Duration::ZERO,
            Some(1),
        )
        .unwrap();
        assert_eq!(m.inputs[0].sha256.len(), 64);
        assert!(m.verify().unwrap());
        std::fs::write(&p, "1,3\n").unwrap();
        assert!(!m.verify().unwrap());
    }

    #[test]
    fn known_digest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc");
        std::fs::write(&p, "abc").unwrap();
        assert_eq!(
            sha256_file(&p).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}

//! Header line stamped on every emitted file.

use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub seed: Option<u64>,
    /// `(input name, sha256 prefix)`
    pub inputs: Vec<(String, String)>,
}

/// First 16 hex digits of the SHA-256.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(digest_bytes(&bytes))
}

impl Provenance {
    pub fn new(seed: Option<u64>) -> Self {
        Provenance { seed, inputs: Vec::new() }
    }

    pub fn input(mut self, name: &str, path: &Path) -> Result<Self> {
        self.inputs.push((name.to_string(), digest_file(path)?));
        Ok(self)
    }

    pub fn input_digest(mut self, name: &str, digest: String) -> Self {
        self.inputs.push((name.to_string(), digest));
        self
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tweetnet {TOOL_VERSION}")?;
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        for (name, d) in &self.inputs {
            write!(f, " {name}=sha256:{d}")?;
        }
        Ok(())
    }
}

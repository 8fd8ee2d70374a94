use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use primordia_core::ParameterSet;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Record written next to every output set. Re-running the recorded
/// `argv` against a config file with the recorded hash reproduces the
/// outputs byte for byte.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub parameters: BTreeMap<String, f64>,
    /// SHA-256 of the config file bytes (of the empty string without one).
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: &ParameterSet, config_bytes: &[u8], seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            parameters: params.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            config_hash: hex(&Sha256::digest(config_bytes)),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_of_empty_config() {
        let m = RunManifest::new("steady", &ParameterSet::default(), b"", None);
        assert_eq!(m.config_hash, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
        assert_eq!(m.parameters.len(), 30);
        assert_eq!(m.parameters["tau"], 60.0);
    }
}

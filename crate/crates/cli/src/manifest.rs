//! Reproducibility manifest embedded in every output artifact.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// SHA-256 of the config file bytes (or of the embedded instance's
    /// canonical serialization for built-in commands).
    pub config_digest: String,
    pub seed: Option<u64>,
    pub timestamp: String,
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in hash {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

impl RunManifest {
    pub fn new(subcommand: &str, config_bytes: &[u8], seed: Option<u64>) -> Self {
        RunManifest {
            tool: "aoi".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config_digest: digest(config_bytes),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

//! Run manifests. The hash covers everything that determines the results
//! (input bytes, caps, flags, tool version) and leaves out the timestamps,
//! so identical re-runs reference the same hash.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};
use sympconfig::arith;
use sympconfig::bounds::CapVector;

#[derive(Debug, Clone, Serialize)]
pub struct CapEntry {
    pub component: usize,
    pub cap: String,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Determining {
    pub command: String,
    pub source: String,
    pub input_sha256: String,
    pub caps: Vec<CapEntry>,
    pub flags: serde_json::Value,
    pub tool_version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub hash: String,
    #[serde(flatten)]
    pub run: Determining,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn cap_entries(caps: &CapVector) -> Vec<CapEntry> {
    caps.per_component
        .iter()
        .zip(&caps.provenance)
        .enumerate()
        .map(|(k, (c, p))| CapEntry { component: k + 1, cap: arith::format_rational(c), provenance: format!("{p:?}") })
        .collect()
}

impl RunManifest {
    pub fn new(command: &str, source: &str, input: &[u8], caps: Vec<CapEntry>, flags: serde_json::Value) -> Self {
        let run = Determining {
            command: command.to_string(),
            source: source.to_string(),
            input_sha256: sha256_hex(input),
            caps,
            flags,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let hash = sha256_hex(serde_json::to_string(&run).expect("serializable").as_bytes());
        RunManifest { hash, run, started_unix: now(), finished_unix: None }
    }

    pub fn finish(&mut self, dir: &Path) -> std::io::Result<()> {
        self.finished_unix = Some(now());
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(self).expect("serializable") + "\n")
    }
}

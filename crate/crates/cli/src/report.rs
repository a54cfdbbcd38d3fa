//! The JSON run report. Everything except the timings is covered by a
//! SHA-256 hash so that reruns can be compared byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub version: String,
    /// SHA-256 of the config text, empty without a config.
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Absent for checks with no numeric threshold.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hashed {
    pub provenance: Provenance,
    pub results: Value,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub hashed: Hashed,
    pub hash: String,
    /// Wall times in seconds.
    pub timings: BTreeMap<String, f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunReport {
    pub fn new(provenance: Provenance, results: Value, checks: Vec<CheckRecord>, timings: BTreeMap<String, f64>) -> Self {
        let hashed = Hashed { provenance, results, checks };
        let hash = sha256_hex(serde_json::to_string(&hashed).expect("serializable").as_bytes());
        Self { hashed, hash, timings }
    }

    pub fn passed(&self) -> bool {
        self.hashed.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub fn check(name: &str, value: f64, tolerance: f64) -> CheckRecord {
    CheckRecord { name: name.to_string(), passed: value <= tolerance, value, tolerance: Some(tolerance) }
}

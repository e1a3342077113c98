//! Run manifest embedded in every report: resolved parameters, input
//! digests and tool version, so two runs are comparable at a glance. The
//! `generated_at` timestamp is the only field excluded from determinism
//! comparisons.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::corpus::Role;
use crate::error::Result;
use crate::proximity::ProximityConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub generated_at: DateTime<Utc>,
    pub config: ConfigEcho,
    pub inputs: Vec<InputDigest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k_hours: f64,
    pub threshold: f64,
    pub horizon_hours: Option<f64>,
    pub use_idf: bool,
    pub similarity: String,
    pub w_ff: f64,
    pub w_ft: f64,
    pub w_fc: f64,
    pub w_tt: f64,
    pub w_tc: f64,
    pub w_cc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(cfg: &ProximityConfig, similarity: &str, inputs: Vec<InputDigest>) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at: Utc::now(),
            config: ConfigEcho {
                a: cfg.a,
                b: cfg.b,
                c: cfg.c,
                k_hours: cfg.k_hours,
                threshold: cfg.threshold,
                horizon_hours: cfg.horizon_hours,
                use_idf: cfg.use_idf,
                similarity: similarity.to_string(),
                w_ff: cfg.weights.get(Role::From, Role::From),
                w_ft: cfg.weights.get(Role::From, Role::To),
                w_fc: cfg.weights.get(Role::From, Role::Cc),
                w_tt: cfg.weights.get(Role::To, Role::To),
                w_tc: cfg.weights.get(Role::To, Role::Cc),
                w_cc: cfg.weights.get(Role::Cc, Role::Cc),
            },
            inputs,
        }
    }
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let data = std::fs::read(path)?;
    let hash = Sha256::digest(&data);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

/// Hash of a report JSON value with the volatile manifest timestamp removed;
/// equal digests mean equal runs.
pub fn determinism_digest(report: &serde_json::Value) -> String {
    let mut value = report.clone();
    if let Some(manifest) = value.get_mut("manifest") {
        if let Some(obj) = manifest.as_object_mut() {
            obj.remove("generated_at");
        }
    }
    let canonical = serde_json::to_string(&value).expect("report serialization");
    let hash = Sha256::digest(canonical.as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_generated_at_only() {
        let a = serde_json::json!({
            "manifest": {"tool_version": "1", "generated_at": "2026-01-01T00:00:00Z"},
            "ects": [1, 2]
        });
        let b = serde_json::json!({
            "manifest": {"tool_version": "1", "generated_at": "2026-01-02T09:30:00Z"},
            "ects": [1, 2]
        });
        assert_eq!(determinism_digest(&a), determinism_digest(&b));
        let c = serde_json::json!({
            "manifest": {"tool_version": "2", "generated_at": "2026-01-01T00:00:00Z"},
            "ects": [1, 2]
        });
        assert_ne!(determinism_digest(&a), determinism_digest(&c));
    }
}

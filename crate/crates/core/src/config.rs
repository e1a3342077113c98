//! Key-value (TOML) configuration file for the proximity parameters, plus
//! CLI overrides.
//!
//! Schema (all keys optional, defaults in parentheses):
//!   a, b, c          GP weights (1/3 each)
//!   k_hours          time constant in hours (360)
//!   threshold        GP link cutoff in [0,1] (0.5)
//!   horizon_hours    |Δt| cap for pair enumeration (absent = unlimited)
//!   use_idf          IDF token weighting (false)
//!   w_ff w_ft w_fc w_tt w_tc w_cc
//!                    the six independent role-weight entries (Table-style
//!                    defaults 1, 1, 0.25, 1, 0.5, 1); the matrix is
//!                    symmetric by construction and Absent pairs are 0.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CcdpError, Result};
use crate::proximity::{ProximityConfig, RoleWeightMatrix};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub k_hours: Option<f64>,
    pub threshold: Option<f64>,
    pub horizon_hours: Option<f64>,
    pub use_idf: Option<bool>,
    pub w_ff: Option<f64>,
    pub w_ft: Option<f64>,
    pub w_fc: Option<f64>,
    pub w_tt: Option<f64>,
    pub w_tc: Option<f64>,
    pub w_cc: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let data = std::fs::read_to_string(path)?;
        ConfigFile::parse(&data)
    }

    pub fn parse(data: &str) -> Result<ConfigFile> {
        toml::from_str(data).map_err(|e| CcdpError::InvalidConfig(e.to_string()))
    }

    /// Apply the file on top of the defaults and validate.
    pub fn resolve(&self) -> Result<ProximityConfig> {
        let defaults = ProximityConfig::default();
        let weights = RoleWeightMatrix::from_upper_triangle(
            self.w_ff.unwrap_or(1.0),
            self.w_ft.unwrap_or(1.0),
            self.w_fc.unwrap_or(0.25),
            self.w_tt.unwrap_or(1.0),
            self.w_tc.unwrap_or(0.5),
            self.w_cc.unwrap_or(1.0),
        )?;
        let cfg = ProximityConfig {
            a: self.a.unwrap_or(defaults.a),
            b: self.b.unwrap_or(defaults.b),
            c: self.c.unwrap_or(defaults.c),
            k_hours: self.k_hours.unwrap_or(defaults.k_hours),
            threshold: self.threshold.unwrap_or(defaults.threshold),
            horizon_hours: self.horizon_hours,
            use_idf: self.use_idf.unwrap_or(false),
            weights,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

//! Versioned run configuration, in the same JSON dialect as the potential
//! document.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    /// Absolute quadrature tolerance per mode.
    pub tol: f64,
    /// Pair-sector truncation of the Fock oracle.
    pub max_pairs: usize,
    /// Shell radii `|h|² ≤ R` for sweeps.
    pub shell_grid: Vec<i64>,
    /// `1/(2N)` instead of `1/N` in the Hartree–Fock interaction terms.
    pub hf_half_prefactor: bool,
    pub seed: u64,
    pub trials: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            tol: 1e-10,
            max_pairs: 2,
            shell_grid: vec![4, 16, 64, 256, 1024],
            hf_half_prefactor: false,
            seed: 42,
            trials: 100,
        }
    }
}

impl RunConfig {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Parse(format!(
                "config version {} unsupported, expected {CONFIG_VERSION}",
                self.version
            )));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Value(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_pairs == 0 {
            return Err(Error::Value("max_pairs must be at least 1".into()));
        }
        if self.shell_grid.is_empty() || self.shell_grid.iter().any(|&r| r < 0) {
            return Err(Error::Value("shell_grid must be a nonempty list of radii ≥ 0".into()));
        }
        Ok(())
    }
}

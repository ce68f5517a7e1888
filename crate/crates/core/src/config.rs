use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::RiskRankConfig;
use crate::error::{Error, Result};
use crate::evaluation::default_mu_grid;
use crate::quarter::Quarter;

/// Run configuration, read from a single JSON document. Every field is
/// optional in the file; command-line flags override it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Pre-crisis horizon `[h1, h2]` in quarters.
    pub horizon: [i32; 2],
    pub mu_grid: Vec<f64>,
    /// Publication lag in quarters.
    pub lag: i32,
    /// First out-of-sample quarter; defaults to the earliest admissible one.
    pub start: Option<Quarter>,
    pub riskrank: RiskRankConfig,
    pub nodes: Option<PathBuf>,
    pub links: Option<PathBuf>,
    pub indicators: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: [5, 12],
            mu_grid: default_mu_grid(),
            lag: 1,
            start: None,
            riskrank: RiskRankConfig::default(),
            nodes: None,
            links: None,
            indicators: None,
            events: None,
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let [h1, h2] = self.horizon;
        if h1 < 1 || h1 > h2 {
            return Err(Error::InvalidParameter(format!("horizon [{h1}, {h2}] must satisfy 1 <= h1 <= h2")));
        }
        if let Some(m) = self.mu_grid.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::InvalidParameter(format!("preference {m} outside [0,1]")));
        }
        if self.lag < 0 {
            return Err(Error::InvalidParameter(format!("lag {} must be >= 0", self.lag)));
        }
        if self.riskrank.max_path_length < 1 {
            return Err(Error::InvalidParameter("max_path_length must be >= 1".into()));
        }
        Ok(())
    }
}

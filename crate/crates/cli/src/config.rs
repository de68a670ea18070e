//! Optional TOML defaults for `campaign`. Keys mirror the flags; flags win.
//!
//! ```toml
//! theorem = "thm05"
//! trials = 200
//! seed = 42
//! budget = 30.0
//! tol = 1e-8
//! abs_tol = 1e-10
//! t_max = 1000
//! sequential = false
//! json = true
//! out = "thm05.json"
//! csv = "summary.csv"
//! ```

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignFile {
    pub theorem: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<f64>,
    pub tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub t_max: Option<u32>,
    pub sequential: Option<bool>,
    pub json: Option<bool>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl CampaignFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("{}: bad campaign config", path.display()))
    }
}

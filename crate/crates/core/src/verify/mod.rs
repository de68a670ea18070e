//! Theorem checks and randomized campaigns.
//!
//! Every check validates its hypotheses first. A trial whose hypotheses fail
//! is skipped; a failed conclusion under valid hypotheses is a counterexample;
//! a passing conclusion whose degree scan is not upward closed is a tolerance
//! anomaly.

mod campaign;
mod checks;
mod report;

pub use campaign::{run_campaign, CampaignConfig, TheoremId};
pub use checks::*;
pub use report::{write_csv_summary, CampaignReport, Finding, SCHEMA_VERSION};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Tolerance;
use crate::transforms::Defect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Counterexample,
    Skipped,
    Anomaly,
}

/// Outcome of one checked instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Largest conclusion defect norm.
    pub defect_norm: f64,
    /// Largest `norm / threshold` over the conclusions; at most 1 means all held.
    pub ratio: f64,
    /// Degrees at which the conclusion was evaluated.
    pub bound: Vec<u32>,
    /// Least first degree passing in the scan, with the other degrees at
    /// their bound.
    pub empirical_degree: Option<u32>,
    /// Whether the defect one degree below the bound is clearly non-zero.
    /// Only set when the bound is non-trivial.
    pub sharp: Option<bool>,
    /// Scan norms for first degrees `0..=bound+2`.
    pub scan_norms: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TrialResult {
    pub fn skipped(reason: impl Into<String>) -> Self {
        Self {
            outcome: Outcome::Skipped,
            reason: Some(reason.into()),
            defect_norm: 0.0,
            ratio: 0.0,
            bound: Vec::new(),
            empirical_degree: None,
            sharp: None,
            scan_norms: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Short key for grouping skip reasons: the text before the first `:`.
    pub fn reason_key(&self) -> Option<&str> {
        self.reason.as_deref().map(|r| r.split(':').next().unwrap_or(r).trim())
    }
}

/// Norm below which a defect one degree under the bound is not taken as a
/// sharpness witness.
pub const SHARPNESS_FLOOR: f64 = 1e-4;

/// Pass/fail over a degree range.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeScan {
    pub min: Option<u32>,
    /// Degrees above `min` that fail.
    pub anomalies: Vec<u32>,
    pub norms: Vec<f64>,
    pub pass: Vec<bool>,
}

/// Evaluate `f(k)` for `k = 0..=upto`.
pub fn degree_scan(upto: u32, tol: &Tolerance, f: impl Fn(u32) -> Result<Defect>) -> Result<DegreeScan> {
    let mut norms = Vec::with_capacity(upto as usize + 1);
    let mut pass = Vec::with_capacity(upto as usize + 1);
    for k in 0..=upto {
        let d = f(k)?;
        norms.push(d.norm());
        pass.push(d.is_zero(tol));
    }
    let min = pass.iter().position(|&p| p).map(|k| k as u32);
    let anomalies = match min {
        Some(k0) => (k0 as usize..pass.len()).filter(|&k| !pass[k]).map(|k| k as u32).collect(),
        None => Vec::new(),
    };
    Ok(DegreeScan {
        min,
        anomalies,
        norms,
        pass,
    })
}

impl DegreeScan {
    /// Sharpness at `bound`: `None` when `bound < 2` or outside the scan.
    pub fn sharp_at(&self, bound: u32) -> Option<bool> {
        if bound < 2 {
            return None;
        }
        let k = bound as usize - 1;
        if k >= self.pass.len() {
            return None;
        }
        Some(!self.pass[k] && self.norms[k] > SHARPNESS_FLOOR)
    }
}

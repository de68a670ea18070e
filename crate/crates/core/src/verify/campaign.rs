use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::{random_instance, Bundle, Profile};
use crate::golden::GoldenFile;
use crate::matrix::Tolerance;
use crate::par::{map_indexed, Execution};

use super::checks::{check_bundle, check_golden, CheckOptions};
use super::report::CampaignReport;
use super::{Outcome, TrialResult};

/// What a campaign verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// Reproduction of the worked examples; every trial is identical.
    Golden,
    Profile(Profile),
}

pub const GOLDEN_ID: &str = "ex00-golden";

impl TheoremId {
    pub fn all() -> Vec<TheoremId> {
        std::iter::once(TheoremId::Golden)
            .chain(Profile::ALL.iter().map(|&p| TheoremId::Profile(p)))
            .collect()
    }

    pub fn id(&self) -> &'static str {
        match self {
            TheoremId::Golden => GOLDEN_ID,
            TheoremId::Profile(p) => p.id(),
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == GOLDEN_ID || s == "ex00" {
            return Ok(TheoremId::Golden);
        }
        s.parse::<Profile>()
            .map(TheoremId::Profile)
            .map_err(|_| invalid(format!("unknown theorem id '{s}'")))
    }
}

impl Serialize for TheoremId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub theorem: TheoremId,
    pub trials: u64,
    /// Trial `i` uses seed `seed + i` (wrapping).
    pub seed: u64,
    pub tol: Tolerance,
    pub budget: Option<Duration>,
    pub execution: Execution,
    /// Trials per scheduling chunk; the budget is checked between chunks.
    pub chunk_size: u64,
    pub t_max: u32,
}

impl CampaignConfig {
    pub fn new(theorem: TheoremId, trials: u64, seed: u64) -> Self {
        Self {
            theorem,
            trials,
            seed,
            tol: Tolerance::default(),
            budget: None,
            execution: Execution::default(),
            chunk_size: 64,
            t_max: CheckOptions::default().t_max,
        }
    }
}

fn run_trial(config: &CampaignConfig, golden: &GoldenFile, seed: u64) -> (TrialResult, Option<Bundle>) {
    let opts = CheckOptions {
        tol: config.tol,
        t_max: config.t_max,
    };
    let (result, bundle) = match config.theorem {
        TheoremId::Golden => (check_golden(golden), None),
        TheoremId::Profile(p) => match random_instance(p, seed) {
            Ok(b) => (check_bundle(&b, &opts), Some(b)),
            Err(e) => (Err(e), None),
        },
    };
    let result = result.unwrap_or_else(|e| TrialResult::skipped(format!("invalid instance: {e}")));
    let keep = matches!(result.outcome, Outcome::Counterexample | Outcome::Anomaly) || result.sharp == Some(true);
    (result, bundle.filter(|_| keep))
}

/// Run a campaign. The report is a deterministic function of the config,
/// except for `wall_time_secs` and, when the budget runs out, the number of
/// trials completed.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    if config.chunk_size == 0 {
        return Err(invalid("chunk_size must be positive"));
    }
    let start = Instant::now();
    let golden = GoldenFile::embedded();
    let mut report = CampaignReport::empty(config.theorem.id(), config.seed, config.trials, config.tol);
    let mut next = 0u64;
    while next < config.trials {
        if config.budget.is_some_and(|b| start.elapsed() >= b) {
            report.budget_exhausted = true;
            break;
        }
        let end = (next + config.chunk_size).min(config.trials);
        let results = map_indexed(next..end, config.execution, |i| {
            run_trial(config, &golden, config.seed.wrapping_add(i))
        });
        for (offset, (result, bundle)) in results.into_iter().enumerate() {
            let i = next + offset as u64;
            report.record(i, config.seed.wrapping_add(i), result, bundle);
        }
        next = end;
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Bundle;
use crate::matrix::Tolerance;

use super::{Outcome, TrialResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Number of sharpness witnesses kept in a report. Counterexamples and
/// anomalies are always kept in full.
pub const WITNESS_CAP: usize = 5;

/// A trial recorded in full: its seed, result and inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub trial: u64,
    pub seed: u64,
    pub result: TrialResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<Bundle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub theorem_id: String,
    pub seed: u64,
    pub requested_trials: u64,
    /// Trials actually run; below `requested_trials` only when the budget ran out.
    pub trials: u64,
    pub passes: u64,
    pub skipped: u64,
    pub tolerance_anomalies: u64,
    pub counterexample_count: u64,
    pub budget_exhausted: bool,
    pub tolerance: Tolerance,
    pub max_defect: f64,
    pub max_ratio: f64,
    /// Passing trials whose bound admits a sharpness probe.
    pub sharpness_checked: u64,
    pub sharpness_count: u64,
    /// `bound - empirical degree` over passing trials with a scan.
    pub degree_gap_histogram: BTreeMap<u32, u64>,
    pub skip_reasons: BTreeMap<String, u64>,
    pub counterexamples: Vec<Finding>,
    pub anomalies: Vec<Finding>,
    pub sharpness_witnesses: Vec<Finding>,
    pub wall_time_secs: f64,
}

impl CampaignReport {
    pub fn empty(theorem_id: &str, seed: u64, requested_trials: u64, tolerance: Tolerance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            theorem_id: theorem_id.to_string(),
            seed,
            requested_trials,
            trials: 0,
            passes: 0,
            skipped: 0,
            tolerance_anomalies: 0,
            counterexample_count: 0,
            budget_exhausted: false,
            tolerance,
            max_defect: 0.0,
            max_ratio: 0.0,
            sharpness_checked: 0,
            sharpness_count: 0,
            degree_gap_histogram: BTreeMap::new(),
            skip_reasons: BTreeMap::new(),
            counterexamples: Vec::new(),
            anomalies: Vec::new(),
            sharpness_witnesses: Vec::new(),
            wall_time_secs: 0.0,
        }
    }

    /// Fold one trial in. Trials must arrive in index order for the report to
    /// be canonical.
    pub fn record(&mut self, trial: u64, seed: u64, result: TrialResult, bundle: Option<Bundle>) {
        self.trials += 1;
        if result.outcome != Outcome::Skipped {
            self.max_defect = self.max_defect.max(result.defect_norm);
            self.max_ratio = self.max_ratio.max(result.ratio);
        }
        let finding = |result: TrialResult, bundle: Option<Bundle>| Finding {
            trial,
            seed,
            result,
            bundle,
        };
        match result.outcome {
            Outcome::Pass => {
                self.passes += 1;
                if let (Some(&b), Some(e)) = (result.bound.first(), result.empirical_degree) {
                    *self.degree_gap_histogram.entry(b.saturating_sub(e)).or_default() += 1;
                }
                if let Some(sharp) = result.sharp {
                    self.sharpness_checked += 1;
                    if sharp {
                        self.sharpness_count += 1;
                        if self.sharpness_witnesses.len() < WITNESS_CAP {
                            self.sharpness_witnesses.push(finding(result, bundle));
                        }
                    }
                }
            }
            Outcome::Skipped => {
                self.skipped += 1;
                let key = result.reason_key().unwrap_or("unspecified").to_string();
                *self.skip_reasons.entry(key).or_default() += 1;
            }
            Outcome::Anomaly => {
                self.tolerance_anomalies += 1;
                self.anomalies.push(finding(result, bundle));
            }
            Outcome::Counterexample => {
                self.counterexample_count += 1;
                self.counterexamples.push(finding(result, bundle));
            }
        }
    }

    /// Trials whose hypotheses held.
    pub fn valid_trials(&self) -> u64 {
        self.trials - self.skipped
    }

    pub fn invariant_holds(&self) -> bool {
        self.passes + self.counterexample_count + self.tolerance_anomalies + self.skipped == self.trials
            && self.counterexample_count == self.counterexamples.len() as u64
            && self.tolerance_anomalies == self.anomalies.len() as u64
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(format!("report serialization: {e}")))
    }

    /// Short human-readable table.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let rows: [(&str, String); 10] = [
            ("theorem", self.theorem_id.clone()),
            ("seed", self.seed.to_string()),
            ("trials", format!("{} of {}", self.trials, self.requested_trials)),
            ("passes", self.passes.to_string()),
            ("skipped", self.skipped.to_string()),
            ("counterexamples", self.counterexample_count.to_string()),
            ("tolerance anomalies", self.tolerance_anomalies.to_string()),
            ("max defect", format!("{:.3e}", self.max_defect)),
            ("sharpness", format!("{} of {}", self.sharpness_count, self.sharpness_checked)),
            ("budget exhausted", self.budget_exhausted.to_string()),
        ];
        for (k, v) in rows {
            out.push_str(&format!("{k:<20} {v}\n"));
        }
        for (reason, n) in &self.skip_reasons {
            out.push_str(&format!("  skipped {n:>5}  {reason}\n"));
        }
        for f in &self.counterexamples {
            out.push_str(&format!(
                "  counterexample trial {} seed {}: {}\n",
                f.trial,
                f.seed,
                f.result.reason.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    theorem_id: &'a str,
    trials: u64,
    passes: u64,
    anomalies: u64,
    max_defect: f64,
}

/// One CSV row per report, with a header.
pub fn write_csv_summary<W: Write>(out: W, reports: &[CampaignReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            theorem_id: &r.theorem_id,
            trials: r.trials,
            passes: r.passes,
            anomalies: r.tolerance_anomalies,
            max_defect: r.max_defect,
        })
        .map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_keeps_counts_consistent() {
        let mut r = CampaignReport::empty("thm05", 7, 3, Tolerance::default());
        let mut pass = TrialResult::skipped("x");
        pass.outcome = Outcome::Pass;
        pass.reason = None;
        pass.bound = vec![3];
        pass.empirical_degree = Some(2);
        pass.sharp = Some(false);
        r.record(0, 7, pass, None);
        r.record(1, 8, TrialResult::skipped("hypothesis A: norm 1"), None);
        let mut bad = TrialResult::skipped("conclusion fails: x");
        bad.outcome = Outcome::Counterexample;
        bad.defect_norm = 2.0;
        r.record(2, 9, bad, None);
        assert!(r.invariant_holds());
        assert_eq!(r.valid_trials(), 2);
        assert_eq!(r.max_defect, 2.0);
        assert_eq!(r.degree_gap_histogram.get(&1), Some(&1));
        assert_eq!(r.skip_reasons.get("hypothesis A"), Some(&1));
        let mut buf = Vec::new();
        write_csv_summary(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "theorem_id,trials,passes,anomalies,max_defect");
        assert!(text.lines().nth(1).unwrap().starts_with("thm05,3,1,0,2"));
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One row per labeling round. Round 0 is the initial random batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub labeled: usize,
    pub added: usize,
    /// Held-out error of the proxy that chose this round's points.
    pub proxy_error: Option<f64>,
}

/// Everything a run determines from its configuration, data and seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub task: String,
    pub method: String,
    pub rounds: Vec<RoundRecord>,
    /// Labeled (active learning) or selected (core-set) examples, in the
    /// order they were chosen.
    pub selected: Vec<usize>,
    pub target_error: f64,
    /// Target trained on the whole pool, when requested.
    pub full_data_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundTiming {
    pub proxy_fit_seconds: f64,
    pub selection_seconds: f64,
}

/// Wall-clock measurements, kept apart from the deterministic outcome.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub rounds: Vec<RoundTiming>,
    /// Sum of proxy fits and selections: the data-selection runtime.
    pub selection_seconds: f64,
    pub target_fit_seconds: f64,
    pub speedup: Option<f64>,
}

impl RunTiming {
    pub(crate) fn push(&mut self, round: RoundTiming) {
        self.selection_seconds += round.proxy_fit_seconds + round.selection_seconds;
        self.rounds.push(round);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub outcome: RunOutcome,
    pub timing: RunTiming,
}

/// `baseline / svp`; both times must be positive.
pub fn speedup(baseline_seconds: f64, svp_seconds: f64) -> Result<f64> {
    for (name, t) in [("baseline", baseline_seconds), ("svp", svp_seconds)] {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Config(format!("{name} time must be positive, got {t}")));
        }
    }
    Ok(baseline_seconds / svp_seconds)
}

impl RunReport {
    /// Data-selection speed-up of this run relative to `baseline`.
    pub fn speedup_over(&self, baseline: &RunReport) -> Result<f64> {
        speedup(baseline.timing.selection_seconds, self.timing.selection_seconds)
    }

    /// Deterministic part as pretty JSON.
    pub fn outcome_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.outcome)? + "\n")
    }

    pub fn timing_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.timing)? + "\n")
    }

    /// Per-round rows: `round,labeled,added,proxy_error,target_error`.
    /// The target error is only filled on the final row.
    pub fn rounds_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["round", "labeled", "added", "proxy_error", "target_error"])?;
        let last = self.outcome.rounds.len().saturating_sub(1);
        for (k, r) in self.outcome.rounds.iter().enumerate() {
            let target = if k == last { self.outcome.target_error.to_string() } else { String::new() };
            w.write_record([
                r.round.to_string(),
                r.labeled.to_string(),
                r.added.to_string(),
                r.proxy_error.map(|e| e.to_string()).unwrap_or_default(),
                target,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

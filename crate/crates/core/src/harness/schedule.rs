use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labeling schedule as fractions of the pool size `n`: an initial random
/// batch, a first selection round, then equal subsequent rounds until the
/// budget is reached. The last round is truncated to land on the budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub initial: f64,
    pub first: f64,
    pub subsequent: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { initial: 0.02, first: 0.08, subsequent: 0.10 }
    }
}

/// Slack for fractions such as `0.1 * 1000 = 100.00000000000001`.
const CEIL_SLACK: f64 = 1e-9;

/// `ceil(fraction * n)`, robust to representation error in `fraction`.
pub fn fraction_of(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - CEIL_SLACK).ceil().max(0.0) as usize).min(n)
}

pub(crate) fn check_fraction(name: &str, f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be in (0, 1], got {f}")))
    }
}

impl Schedule {
    /// Cumulative labeled-set sizes, starting with the initial batch and
    /// ending exactly at `ceil(budget_fraction * n)`. Each size is computed
    /// from the cumulative fraction, so rounding never accumulates.
    pub fn labeled_sizes(&self, n: usize, budget_fraction: f64) -> Result<Vec<usize>> {
        check_fraction("schedule.initial", self.initial)?;
        check_fraction("schedule.first", self.first)?;
        check_fraction("schedule.subsequent", self.subsequent)?;
        check_fraction("budget_fraction", budget_fraction)?;
        let budget = fraction_of(budget_fraction, n);
        let initial = fraction_of(self.initial, n);
        if initial == 0 {
            return Err(Error::Config(format!("initial fraction {} labels no points of {n}", self.initial)));
        }
        if initial > budget {
            return Err(Error::Config(format!("initial batch ({initial}) exceeds budget ({budget})")));
        }
        let mut sizes = vec![initial];
        let mut round = 1usize;
        while *sizes.last().unwrap() < budget {
            let cumulative = self.initial + self.first + (round - 1) as f64 * self.subsequent;
            let size = fraction_of(cumulative, n).min(budget);
            if size <= *sizes.last().unwrap() {
                return Err(Error::Config(format!("schedule round {round} adds no points at n = {n}")));
            }
            sizes.push(size);
            round += 1;
        }
        Ok(sizes)
    }
}

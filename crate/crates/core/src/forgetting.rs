//! Forgetting events.
//!
//! An example is forgotten when it was classified correctly at one
//! observation and incorrectly at its next one. Examples never classified
//! correctly rank above every finite count.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Per-example correctness observed at each training step (`examples x steps`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainLog {
    examples: usize,
    steps: usize,
    bits: Vec<bool>,
}

impl TrainLog {
    pub fn from_bits(examples: usize, steps: usize, bits: Vec<bool>) -> Result<Self> {
        if examples == 0 || steps == 0 {
            return Err(Error::Shape(format!("train log needs positive dimensions, got {examples}x{steps}")));
        }
        if bits.len() != examples * steps {
            return Err(Error::Shape(format!(
                "{examples}x{steps} log needs {} cells, got {}",
                examples * steps,
                bits.len()
            )));
        }
        Ok(Self { examples, steps, bits })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let steps = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != steps) {
            return Err(Error::Shape("ragged train log rows".into()));
        }
        Self::from_bits(rows.len(), steps, rows.concat())
    }

    #[inline]
    pub fn examples(&self) -> usize {
        self.examples
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.steps..(i + 1) * self.steps]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[bool]> {
        self.bits.chunks_exact(self.steps)
    }

    pub(crate) fn as_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().map(|&b| b as u8)
    }
}

/// Running forgetting statistics for one example.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForgettingState {
    pub prev_correct: bool,
    pub learned: bool,
    pub count: u32,
}

impl ForgettingState {
    pub fn score(&self) -> ForgettingScore {
        ForgettingScore { never_learned: !self.learned, count: if self.learned { self.count } else { 0 } }
    }
}

/// Advances the state by one observation. `correct` is the example's
/// correctness on its forward pass, taken before the gradient step.
#[inline]
pub fn streaming_update(prev: ForgettingState, correct: bool) -> ForgettingState {
    ForgettingState {
        prev_correct: correct,
        learned: prev.learned || correct,
        count: prev.count + u32::from(prev.prev_correct && !correct),
    }
}

/// Forgetting score. Ordered so that larger means "select first":
/// never-learned examples beat any finite count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ForgettingScore {
    pub never_learned: bool,
    pub count: u32,
}

impl Ord for ForgettingScore {
    fn cmp(&self, other: &Self) -> Ordering {
        self.never_learned.cmp(&other.never_learned).then(self.count.cmp(&other.count))
    }
}

impl PartialOrd for ForgettingScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ForgettingScore {
    /// Real-valued form for rank correlation: never-learned maps to `+inf`.
    pub fn as_f64(&self) -> f64 {
        if self.never_learned {
            f64::INFINITY
        } else {
            self.count as f64
        }
    }
}

pub fn process_row(row: &[bool]) -> ForgettingScore {
    row.iter().fold(ForgettingState::default(), |s, &c| streaming_update(s, c)).score()
}

pub fn process_log(log: &TrainLog) -> Vec<ForgettingScore> {
    log.iter_rows().map(process_row).collect()
}

/// The `m` most forgotten examples: never-learned first, then count
/// descending, then index ascending.
pub fn select_most_forgotten(scores: &[ForgettingScore], m: usize) -> Result<Vec<usize>> {
    if m > scores.len() {
        return Err(Error::TooMany { requested: m, available: scores.len() });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(m);
    Ok(order)
}

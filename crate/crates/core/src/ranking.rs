//! Rankings and rank correlation.
//!
//! Ties receive the average of the ranks they span, so a ranking over `n`
//! items always sums to `n (n + 1) / 2`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Average-tie ranks in `[1, n]`, aligned with example indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Ranking {
    ranks: Vec<f64>,
}

impl Ranking {
    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Ranking from a priority order (first element = rank 1). `order` must
    /// be a permutation of `0..order.len()`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let mut ranks = vec![0.0; order.len()];
        for (pos, &i) in order.iter().enumerate() {
            if i >= order.len() {
                return Err(Error::IndexOutOfRange { index: i, n: order.len() });
            }
            if ranks[i] != 0.0 {
                return Err(Error::DuplicateIndex(i));
            }
            ranks[i] = (pos + 1) as f64;
        }
        Ok(Self { ranks })
    }
}

/// Ranks `scores`. With `descending`, rank 1 goes to the highest score.
/// Infinite scores are allowed (never-learned forgetting scores rank as
/// `+inf`); NaN is rejected.
pub fn scores_to_ranks<T: Scalar>(scores: &[T], descending: bool) -> Result<Ranking> {
    if let Some(i) = scores.iter().position(|v| v.is_nan()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    let cmp = |a: &usize, b: &usize| -> Ordering {
        let o = scores[*a].partial_cmp(&scores[*b]).unwrap();
        if descending {
            o.reverse()
        } else {
            o
        }
    };
    order.sort_by(cmp);

    let mut ranks = vec![0.0; scores.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) share ranks start+1..=end.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    Ok(Ranking { ranks })
}

fn check_pair(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("correlation inputs differ in length ({a} vs {b})")));
    }
    if a < 2 {
        return Err(Error::Degenerate(format!("correlation needs at least 2 values, got {a}")));
    }
    Ok(())
}

/// Product-moment correlation. Constant inputs are an error.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Result<f64> {
    check_pair(x.len(), y.len())?;
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("pearson input contains a non-finite value".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().map(|v| v.as_f64()).sum::<f64>() / n;
    let my = y.iter().map(|v| v.as_f64()).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a.as_f64() - mx;
        let dy = b.as_f64() - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    // sqrt(fl(s * s)) == s, so identical inputs give exactly 1.
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation: Pearson correlation of the average-tie ranks.
pub fn spearman<T: Scalar>(a: &[T], b: &[T]) -> Result<f64> {
    check_pair(a.len(), b.len())?;
    let ra = scores_to_ranks(a, true)?;
    let rb = scores_to_ranks(b, true)?;
    pearson(ra.ranks(), rb.ranks()).map_err(|_| Error::Degenerate("spearman input has a single distinct value".into()))
}

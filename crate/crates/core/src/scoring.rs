//! Uncertainty scores over predicted class probabilities.
//!
//! All scores are oriented so that a higher value means "more informative,
//! select first".

use std::cmp::Ordering;
use std::ops::Deref;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::ProbMatrix;
use crate::scalar::Scalar;

/// Per-example scores aligned with the rows they were computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector<T>(Vec<T>);

impl<T: Scalar> ScoreVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self(values))
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for ScoreVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UncertaintyMethod {
    LeastConfidence,
    Entropy,
    Margin,
}

impl std::str::FromStr for UncertaintyMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "confidence" | "least_confidence" => Ok(Self::LeastConfidence),
            "entropy" => Ok(Self::Entropy),
            "margin" => Ok(Self::Margin),
            other => Err(Error::Config(format!("unknown uncertainty method {other:?}"))),
        }
    }
}

pub fn score<T: Scalar>(method: UncertaintyMethod, p: &ProbMatrix<T>) -> ScoreVector<T> {
    match method {
        UncertaintyMethod::LeastConfidence => least_confidence(p),
        UncertaintyMethod::Entropy => entropy(p),
        UncertaintyMethod::Margin => margin(p),
    }
}

fn per_row<T: Scalar>(p: &ProbMatrix<T>, f: impl Fn(&[T]) -> T + Sync) -> ScoreVector<T> {
    let rows: Vec<&[T]> = p.iter_rows().collect();
    ScoreVector(rows.par_iter().map(|r| f(r)).collect())
}

fn row_max<T: Scalar>(r: &[T]) -> T {
    r.iter().copied().fold(T::neg_infinity(), T::max)
}

/// `1 - max_j p[i, j]`.
pub fn least_confidence<T: Scalar>(p: &ProbMatrix<T>) -> ScoreVector<T> {
    per_row(p, |r| T::one() - row_max(r))
}

/// `-sum_j p ln p`, with `0 ln 0 = 0`.
pub fn entropy<T: Scalar>(p: &ProbMatrix<T>) -> ScoreVector<T> {
    per_row(p, |r| {
        let h: T = r.iter().filter(|v| **v > T::zero()).map(|&v| v * v.ln()).sum();
        // Clamp the -0.0 produced by one-hot rows.
        (-h).max(T::zero())
    })
}

/// `1 - (p_(1) - p_(2))` for the two largest entries of each row.
pub fn margin<T: Scalar>(p: &ProbMatrix<T>) -> ScoreVector<T> {
    per_row(p, |r| {
        let (mut first, mut second) = (T::neg_infinity(), T::neg_infinity());
        for &v in r {
            if v > first {
                second = first;
                first = v;
            } else if v > second {
                second = v;
            }
        }
        T::one() - (first - second)
    })
}

/// Descending comparison on score with ascending-index tie break.
pub(crate) fn priority_cmp<T: Scalar>(scores: &[T], a: usize, b: usize) -> Ordering {
    scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b))
}

/// Indices of the `m` largest scores, highest first; ties go to the lower index.
pub fn top_m<T: Scalar>(scores: &[T], m: usize) -> Result<Vec<usize>> {
    if m > scores.len() {
        return Err(Error::TooMany { requested: m, available: scores.len() });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    if m < order.len() && m > 0 {
        order.select_nth_unstable_by(m - 1, |&a, &b| priority_cmp(scores, a, b));
    }
    order.truncate(m);
    order.sort_by(|&a, &b| priority_cmp(scores, a, b));
    Ok(order)
}

/// [`top_m`] restricted to a candidate pool; returns pool members.
pub fn top_m_of<T: Scalar>(scores: &[T], pool: &[usize], m: usize) -> Result<Vec<usize>> {
    let sub: Vec<T> = pool.iter().map(|&i| scores[i]).collect();
    Ok(top_m(&sub, m)?.into_iter().map(|k| pool[k]).collect())
}

//! Greedy k-centers (farthest-first traversal) over Euclidean features.
//!
//! Each example keeps its squared distance to the nearest chosen point, so
//! adding a center costs one pass over the data: the whole selection is
//! `O((|initial| + budget) * n * d)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Below this many `n * d` multiply-adds per pass the update runs serially.
const PARALLEL_THRESHOLD: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct KCentersResult<T> {
    /// Selected indices in the order they were added.
    pub order: Vec<usize>,
    /// Distance from each selected point to the set at the time it was chosen.
    pub selection_dists: Vec<T>,
    /// Final distance from every example to its nearest chosen point.
    pub min_dists: Vec<T>,
}

#[inline]
pub(crate) fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Checks an index set against `n`; rejects out-of-range and duplicate entries.
fn membership(indices: &[usize], n: usize) -> Result<Vec<bool>> {
    let mut member = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if std::mem::replace(&mut member[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(member)
}

/// Folds the newest center into the cache and returns the farthest
/// unselected example as `(index, squared distance)`. Ties go to the lower
/// index regardless of how the reduction is split.
fn update_and_argmax<T: Scalar>(
    features: &Matrix<T>,
    center: usize,
    cache: &mut [T],
    selected: &[bool],
) -> Option<(usize, T)> {
    let c = features.row(center);
    let step = |i: usize, slot: &mut T| -> Option<(usize, T)> {
        let d = sq_dist(features.row(i), c);
        if d < *slot {
            *slot = d;
        }
        (!selected[i]).then_some((i, *slot))
    };
    let better = |a: Option<(usize, T)>, b: Option<(usize, T)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    };
    if features.rows() * features.cols() < PARALLEL_THRESHOLD {
        cache.iter_mut().enumerate().fold(None, |best, (i, slot)| better(best, step(i, slot)))
    } else {
        cache
            .par_iter_mut()
            .enumerate()
            .fold(|| None, |best, (i, slot)| better(best, step(i, slot)))
            .reduce(|| None, better)
    }
}

/// Adds `budget` points to `initial`, each time the unselected example
/// farthest from everything chosen so far.
pub fn greedy_kcenters<T: Scalar>(features: &Matrix<T>, initial: &[usize], budget: usize) -> Result<KCentersResult<T>> {
    let n = features.rows();
    if initial.is_empty() {
        return Err(Error::EmptyInitialSet);
    }
    let mut selected = membership(initial, n)?;
    let available = n - initial.len();
    if budget > available {
        return Err(Error::TooMany { requested: budget, available });
    }

    let mut cache = vec![T::infinity(); n];
    let mut next = None;
    for &c in initial {
        next = update_and_argmax(features, c, &mut cache, &selected);
    }

    let mut order = Vec::with_capacity(budget);
    let mut selection_dists = Vec::with_capacity(budget);
    while order.len() < budget {
        let (u, d) = next.expect("unselected examples remain while budget is unmet");
        selected[u] = true;
        order.push(u);
        selection_dists.push(d.sqrt());
        next = update_and_argmax(features, u, &mut cache, &selected);
    }

    Ok(KCentersResult { order, selection_dists, min_dists: cache.into_iter().map(T::sqrt).collect() })
}

/// Largest distance from any example to its nearest center.
pub fn kcenter_radius<T: Scalar>(features: &Matrix<T>, centers: &[usize]) -> Result<T> {
    if centers.is_empty() {
        return Err(Error::EmptyInitialSet);
    }
    membership(centers, features.rows())?;
    let worst = features
        .iter_rows()
        .map(|x| centers.iter().map(|&c| sq_dist(x, features.row(c))).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max);
    Ok(worst.sqrt())
}

/// Addition order of every non-initial example; earliest is highest priority.
pub fn kcenters_full_ranking<T: Scalar>(features: &Matrix<T>, initial: &[usize]) -> Result<KCentersResult<T>> {
    let budget = features.rows().saturating_sub(initial.len());
    greedy_kcenters(features, initial, budget)
}

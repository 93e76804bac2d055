//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use svp_core::learner::{make_blobs, make_synthetic, Blob, Dataset, LearnerSpec, SyntheticDataset, SyntheticParams};
use svp_core::{Matrix, SplitMix64};

pub fn al_proxy(seed: u64) -> LearnerSpec {
    LearnerSpec::logistic(20, 0.1, 32, seed)
}

pub fn al_target(seed: u64) -> LearnerSpec {
    LearnerSpec::mlp(32, 40, 0.05, 32, seed)
}

/// Noisy-SGD logistic proxy used for forgetting-event selection.
pub fn forgetting_proxy(seed: u64) -> LearnerSpec {
    LearnerSpec::logistic(30, 1.0, 4, seed)
}

/// Four classes in ten dimensions, means 4 sigma apart.
pub fn four_class(seed: u64) -> SyntheticDataset {
    make_synthetic(&SyntheticParams {
        classes: 4,
        dim: 10,
        separation: 4.0,
        noise: 1.0,
        train_size: 2000,
        test_size: 2000,
        seed,
    })
    .unwrap()
}

/// Two overlapping blobs (1.5 sigma apart, 20% of the data each) and one
/// far, easy blob holding the remaining 60%.
pub fn three_blob(seed: u64, n: usize) -> SyntheticDataset {
    let dim = 10;
    let hard = n / 5;
    let easy = n - 2 * hard;
    let at = |axis: usize, v: f64| {
        let mut m = vec![0.0; dim];
        m[axis] = v;
        m
    };
    let blobs = [
        Blob { mean: at(0, -0.75), noise: 1.0, label: 0, train_size: hard, test_size: hard },
        Blob { mean: at(0, 0.75), noise: 1.0, label: 1, train_size: hard, test_size: hard },
        Blob { mean: at(1, 12.0), noise: 1.0, label: 2, train_size: easy, test_size: easy },
    ];
    make_blobs(&blobs, 3, seed).unwrap()
}

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize, scale: f64) -> Matrix<f64> {
    Matrix::new(rows, cols, (0..rows * cols).map(|_| scale * rng.normal()).collect()).unwrap()
}

pub fn random_dataset(rng: &mut SplitMix64, rows: usize, dim: usize, classes: usize) -> Dataset<f64> {
    let x = random_matrix(rng, rows, dim, 1.0);
    let y = (0..rows).map(|_| rng.below(classes)).collect();
    Dataset::new(x, y, classes).unwrap()
}

/// Greedy k-centers recomputed from scratch at every step: for each
/// candidate, the minimum squared distance to the current set; the largest
/// wins, lowest index on ties.
pub fn brute_force_kcenters(x: &Matrix<f64>, initial: &[usize], budget: usize) -> Vec<usize> {
    let n = x.rows();
    let mut set: Vec<usize> = initial.to_vec();
    let mut order = Vec::new();
    for _ in 0..budget {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if set.contains(&i) {
                continue;
            }
            let mut nearest = f64::INFINITY;
            for &j in &set {
                let mut d = 0.0;
                for k in 0..x.cols() {
                    let diff = x.get(i, k) - x.get(j, k);
                    d += diff * diff;
                }
                nearest = nearest.min(d);
            }
            if best.is_none_or(|(_, b)| nearest > b) {
                best = Some((i, nearest));
            }
        }
        let (u, _) = best.unwrap();
        set.push(u);
        order.push(u);
    }
    order
}

fn dist(x: &Matrix<f64>, i: usize, j: usize) -> f64 {
    x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Optimal k-center radius by enumerating every `k`-subset.
pub fn exhaustive_radius(x: &Matrix<f64>, k: usize) -> f64 {
    fn rec(x: &Matrix<f64>, k: usize, start: usize, chosen: &mut Vec<usize>, best: &mut f64) {
        if chosen.len() == k {
            let r = (0..x.rows())
                .map(|i| chosen.iter().map(|&c| dist(x, i, c)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            *best = best.min(r);
            return;
        }
        for c in start..x.rows() {
            chosen.push(c);
            rec(x, k, c + 1, chosen, best);
            chosen.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(x, k, 0, &mut Vec::new(), &mut best);
    best
}

/// Forgetting events as the number of adjacent (correct, incorrect) pairs.
pub fn count_transitions(row: &[bool]) -> (bool, u32) {
    let never = !row.iter().any(|&b| b);
    let count = row.windows(2).filter(|w| w[0] && !w[1]).count() as u32;
    (never, count)
}

/// Norm-wise relative error between two gradient vectors.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Central finite differences of `loss` around `params`.
pub fn finite_difference(params: &[f64], step: f64, mut loss: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|k| {
            let orig = p[k];
            p[k] = orig + step;
            let up = loss(&p);
            p[k] = orig - step;
            let down = loss(&p);
            p[k] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

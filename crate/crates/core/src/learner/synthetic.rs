//! Seeded Gaussian-blob datasets.

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::SplitMix64;

/// `classes` isotropic Gaussian blobs in `dim` dimensions.
///
/// Class means are `separation / sqrt(2)` times seeded orthonormal
/// directions (Gram-Schmidt on Gaussian draws), so every pair of means is
/// exactly `separation` apart when `classes <= dim`. With more classes than
/// dimensions the directions are unit vectors drawn independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticParams {
    pub classes: usize,
    pub dim: usize,
    pub separation: f64,
    pub noise: f64,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticDataset {
    pub train: Dataset<f64>,
    pub test: Dataset<f64>,
}

/// One Gaussian component with a fixed label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Blob {
    pub mean: Vec<f64>,
    pub noise: f64,
    pub label: usize,
    pub train_size: usize,
    pub test_size: usize,
}

fn sample(rng: &mut SplitMix64, mean: &[f64], noise: f64, out: &mut Vec<f64>) {
    out.extend(mean.iter().map(|m| m + noise * rng.normal()));
}

fn class_means(p: &SyntheticParams, rng: &mut SplitMix64) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(p.classes);
    while dirs.len() < p.classes {
        let mut v: Vec<f64> = (0..p.dim).map(|_| rng.normal()).collect();
        if dirs.len() < p.dim {
            for d in &dirs {
                let proj: f64 = v.iter().zip(d).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(d).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        dirs.push(v.into_iter().map(|a| a / norm).collect());
    }
    let scale = p.separation / std::f64::consts::SQRT_2;
    dirs.into_iter().map(|d| d.into_iter().map(|a| a * scale).collect()).collect()
}

/// Balanced blobs; example `i` of either split has label `i % classes`.
pub fn make_synthetic(p: &SyntheticParams) -> Result<SyntheticDataset> {
    if p.classes < 2 || p.dim == 0 || p.train_size == 0 || p.test_size == 0 {
        return Err(Error::Config(format!(
            "synthetic data needs classes >= 2 and positive dim/train/test sizes, got {p:?}"
        )));
    }
    if !(p.noise.is_finite() && p.noise >= 0.0 && p.separation.is_finite() && p.separation >= 0.0) {
        return Err(Error::Config("noise and separation must be finite and non-negative".into()));
    }
    let mut rng = SplitMix64::new(p.seed);
    let means = class_means(p, &mut rng);
    let mut split = |size: usize| -> Result<Dataset<f64>> {
        let mut data = Vec::with_capacity(size * p.dim);
        let labels: Vec<usize> = (0..size).map(|i| i % p.classes).collect();
        for &y in &labels {
            sample(&mut rng, &means[y], p.noise, &mut data);
        }
        Dataset::new(Matrix::new(size, p.dim, data)?, labels, p.classes)
    };
    let train = split(p.train_size)?;
    let test = split(p.test_size)?;
    Ok(SyntheticDataset { train, test })
}

/// Explicit blob mixture. Points are generated blob by blob, then each
/// split is put in a seeded random order.
pub fn make_blobs(blobs: &[Blob], classes: usize, seed: u64) -> Result<SyntheticDataset> {
    let dim = blobs.first().map_or(0, |b| b.mean.len());
    if dim == 0 || blobs.iter().any(|b| b.mean.len() != dim) {
        return Err(Error::Config("blobs need non-empty means of equal dimension".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut split = |size_of: fn(&Blob) -> usize| -> Result<Dataset<f64>> {
        let mut rows: Vec<(Vec<f64>, usize)> = Vec::new();
        for b in blobs {
            for _ in 0..size_of(b) {
                let mut x = Vec::with_capacity(dim);
                sample(&mut rng, &b.mean, b.noise, &mut x);
                rows.push((x, b.label));
            }
        }
        rng.shuffle(&mut rows);
        let labels = rows.iter().map(|r| r.1).collect();
        let data = rows.into_iter().flat_map(|r| r.0).collect::<Vec<_>>();
        Dataset::new(Matrix::new(data.len() / dim, dim, data)?, labels, classes)
    };
    let train = split(|b| b.train_size)?;
    let test = split(|b| b.test_size)?;
    Ok(SyntheticDataset { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64) -> SyntheticParams {
        SyntheticParams { classes: 3, dim: 5, separation: 4.0, noise: 1.0, train_size: 100, test_size: 31, seed }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(make_synthetic(&params(4)).unwrap(), make_synthetic(&params(4)).unwrap());
        assert_ne!(make_synthetic(&params(4)).unwrap(), make_synthetic(&params(5)).unwrap());
    }

    #[test]
    fn balanced_classes() {
        let d = make_synthetic(&params(1)).unwrap();
        for split in [&d.train, &d.test] {
            let mut counts = [0usize; 3];
            split.labels.iter().for_each(|&l| counts[l] += 1);
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
    }

    #[test]
    fn means_are_separated_exactly() {
        let p = params(2);
        let means = class_means(&p, &mut SplitMix64::new(p.seed));
        for a in 0..3 {
            for b in a + 1..3 {
                let d: f64 = means[a].iter().zip(&means[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!((d - 4.0).abs() < 1e-9, "{d}");
            }
        }
    }

    #[test]
    fn invalid_params() {
        let mut p = params(0);
        p.classes = 1;
        assert!(make_synthetic(&p).is_err());
        let mut p = params(0);
        p.train_size = 0;
        assert!(make_synthetic(&p).is_err());
    }

    #[test]
    fn blob_sizes_and_labels() {
        let blobs = [
            Blob { mean: vec![0.0, 0.0], noise: 1.0, label: 0, train_size: 10, test_size: 2 },
            Blob { mean: vec![9.0, 9.0], noise: 1.0, label: 1, train_size: 30, test_size: 4 },
        ];
        let d = make_blobs(&blobs, 2, 3).unwrap();
        assert_eq!(d.train.len(), 40);
        assert_eq!(d.test.len(), 6);
        assert_eq!(d.train.labels.iter().filter(|&&l| l == 1).count(), 30);
    }
}

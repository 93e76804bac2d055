//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "task": "al",
//!   "proxy":  {"kind": "logistic", "epochs": 20, "learning_rate": 0.1, "batch_size": 32, "seed": 1},
//!   "target": {"kind": "mlp", "hidden_units": 32, "epochs": 30, "learning_rate": 0.05, "batch_size": 32, "seed": 2},
//!   "method": "least_confidence",
//!   "budget_fraction": 0.3,
//!   "schedule": {"initial": 0.02, "first": 0.08, "subsequent": 0.1},
//!   "data": {"synthetic": {"classes": 4, "dim": 10, "separation": 3.0, "noise": 1.0,
//!                          "train_size": 2000, "test_size": 1000, "seed": 7}},
//!   "seed": 11,
//!   "output": "run.json"
//! }
//! ```
//!
//! Core-set runs use `"task": "coreset"` with `subset_fraction` and an
//! optional `compare_full`. `data` may instead name files:
//! `{"files": {"train_features": "x.svpt", "train_labels": "y.csv", ...}}`.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AlConfig, AlMethod, CoresetConfig, CoresetMethod, Schedule};
use crate::error::{Error, Result};
use crate::learner::synthetic::{make_blobs, make_synthetic, Blob, SyntheticParams};
use crate::learner::{Dataset, LearnerSpec};
use crate::tensor_io::{read_labels_csv, read_tensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Al,
    Coreset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileData {
    pub train_features: PathBuf,
    pub train_labels: PathBuf,
    pub test_features: PathBuf,
    pub test_labels: PathBuf,
    /// Defaults to one more than the largest label seen.
    #[serde(default)]
    pub classes: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Synthetic(SyntheticParams),
    Blobs { blobs: Vec<Blob>, classes: usize, seed: u64 },
    Files(FileData),
}

impl DataSource {
    /// Loads `(train, test)`. Relative file paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<(Dataset<f64>, Dataset<f64>)> {
        match self {
            Self::Synthetic(p) => {
                let d = make_synthetic(p)?;
                Ok((d.train, d.test))
            }
            Self::Blobs { blobs, classes, seed } => {
                let d = make_blobs(blobs, *classes, *seed)?;
                Ok((d.train, d.test))
            }
            Self::Files(f) => {
                let path = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
                let labels =
                    |p: &PathBuf| -> Result<Vec<usize>> { Ok(read_labels_csv(BufReader::new(File::open(path(p))?))?) };
                let (ytr, yte) = (labels(&f.train_labels)?, labels(&f.test_labels)?);
                let classes = match f.classes {
                    Some(c) => c,
                    None => ytr.iter().chain(&yte).max().map_or(0, |m| m + 1),
                };
                let train = Dataset::new(read_tensor(path(&f.train_features))?.cast(), ytr, classes)?;
                let test = Dataset::new(read_tensor(path(&f.test_features))?.cast(), yte, classes)?;
                Ok((train, test))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub proxy: LearnerSpec,
    pub target: LearnerSpec,
    /// `least_confidence | kcenters | random` for al;
    /// `entropy | kcenters | forgetting | random` for coreset.
    pub method: String,
    #[serde(default)]
    pub budget_fraction: Option<f64>,
    #[serde(default)]
    pub subset_fraction: Option<f64>,
    #[serde(default)]
    pub schedule: Option<Schedule>,
    pub data: DataSource,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub compare_full: bool,
    /// Data-selection seconds of a previously recorded baseline; when set
    /// the report includes the speed-up over it.
    #[serde(default)]
    pub baseline_selection_seconds: Option<f64>,
}

fn parse_method<M: for<'de> Deserialize<'de>>(name: &str) -> Result<M> {
    serde_json::from_value(serde_json::Value::String(name.to_owned()))
        .map_err(|_| Error::Config(format!("unknown method {name:?}")))
}

impl ExperimentConfig {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }

    pub fn al_config(&self) -> Result<AlConfig> {
        if self.task != Task::Al {
            return Err(Error::Config("not an active-learning config".into()));
        }
        Ok(AlConfig {
            proxy: self.proxy.clone(),
            target: self.target.clone(),
            method: parse_method::<AlMethod>(&self.method)?,
            budget_fraction: self
                .budget_fraction
                .ok_or_else(|| Error::Config("al task needs budget_fraction".into()))?,
            schedule: self.schedule.clone().unwrap_or_default(),
            seed: self.seed,
        })
    }

    pub fn coreset_config(&self) -> Result<CoresetConfig> {
        if self.task != Task::Coreset {
            return Err(Error::Config("not a core-set config".into()));
        }
        Ok(CoresetConfig {
            proxy: self.proxy.clone(),
            target: self.target.clone(),
            method: parse_method::<CoresetMethod>(&self.method)?,
            subset_fraction: self
                .subset_fraction
                .ok_or_else(|| Error::Config("coreset task needs subset_fraction".into()))?,
            seed: self.seed,
            compare_full: self.compare_full,
        })
    }

    /// Loads the data and runs the configured task with wall-clock timing.
    pub fn run(&self, base: &Path) -> Result<super::RunReport> {
        let (train, test) = self.data.load(base)?;
        let mut clock = super::WallClock;
        let mut report = match self.task {
            Task::Al => super::run_active_learning(&self.al_config()?, &train, &test, &mut clock)?,
            Task::Coreset => super::run_coreset(&self.coreset_config()?, &train, &test, &mut clock)?,
        };
        if let Some(base_secs) = self.baseline_selection_seconds {
            report.timing.speedup = Some(super::speedup(base_secs, report.timing.selection_seconds)?);
        }
        Ok(report)
    }
}

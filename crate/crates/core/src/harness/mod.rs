//! End-to-end selection protocols.
//!
//! * [`run_active_learning`]: pool-based batch active learning. Each round a
//!   selector model is trained from scratch on everything labeled so far and
//!   picks the next batch; the target is trained once on the final set.
//! * [`run_coreset`]: a selector trained on the full pool ranks every
//!   example, the top fraction is kept, and the target is trained on it.
//!
//! The selector is the proxy spec. Passing the target spec as the proxy
//! gives the classical baseline where the target selects for itself.

mod config;
mod report;
mod schedule;
mod timer;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forgetting::{process_log, select_most_forgotten};
use crate::kcenters::greedy_kcenters;
use crate::learner::{fit, Dataset, LearnerSpec, TrainedModel};
use crate::ranking::spearman;
use crate::rng::{derive_seed, SplitMix64};
use crate::scalar::Scalar;
use crate::scoring::{entropy, least_confidence, top_m};

pub use config::{DataSource, ExperimentConfig, FileData, Task};
pub use report::{speedup, RoundRecord, RoundTiming, RunOutcome, RunReport, RunTiming};
pub use schedule::{fraction_of, Schedule};
pub use timer::{FixedTimer, Phase, PhaseTimer, WallClock};

// Sub-stream tags for `derive_seed`.
const INITIAL_POOL_STREAM: u64 = 0x5330;
const RANDOM_ROUND_STREAM: u64 = 0x5352;
const PROXY_ROUND_STREAM: u64 = 0x5350;
const CORESET_STREAM: u64 = 0x4353;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlMethod {
    LeastConfidence,
    Kcenters,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoresetMethod {
    Entropy,
    Kcenters,
    Forgetting,
    Random,
}

impl AlMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LeastConfidence => "least_confidence",
            Self::Kcenters => "kcenters",
            Self::Random => "random",
        }
    }
}

impl CoresetMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::Kcenters => "kcenters",
            Self::Forgetting => "forgetting",
            Self::Random => "random",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlConfig {
    pub proxy: LearnerSpec,
    pub target: LearnerSpec,
    pub method: AlMethod,
    pub budget_fraction: f64,
    pub schedule: Schedule,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoresetConfig {
    pub proxy: LearnerSpec,
    pub target: LearnerSpec,
    pub method: CoresetMethod,
    pub subset_fraction: f64,
    pub seed: u64,
    /// Also train the target on the whole pool and report its error.
    pub compare_full: bool,
}

/// Uniform sample of `m` pool members without replacement, in draw order.
pub fn random_select(pool: &[usize], m: usize, seed: u64) -> Result<Vec<usize>> {
    if m > pool.len() {
        return Err(Error::TooMany { requested: m, available: pool.len() });
    }
    let mut items = pool.to_vec();
    let mut rng = SplitMix64::new(seed);
    for i in 0..m {
        let j = i + rng.below(items.len() - i);
        items.swap(i, j);
    }
    items.truncate(m);
    Ok(items)
}

fn sorted(indices: &[usize]) -> Vec<usize> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v
}

fn check_pair<T: Scalar>(train: &Dataset<T>, test: &Dataset<T>) -> Result<()> {
    if train.features.cols() != test.features.cols() || train.classes != test.classes {
        return Err(Error::Shape(format!(
            "train ({} features, {} classes) and test ({} features, {} classes) disagree",
            train.features.cols(),
            train.classes,
            test.features.cols(),
            test.classes
        )));
    }
    Ok(())
}

/// Picks `quota` new points from `unlabeled` with a freshly trained selector.
fn select_round<T: Scalar>(
    method: AlMethod,
    model: &TrainedModel<T>,
    train: &Dataset<T>,
    labeled: &[usize],
    unlabeled: &[usize],
    quota: usize,
) -> Result<Vec<usize>> {
    match method {
        AlMethod::LeastConfidence => {
            let probs = model.predict_proba(&train.features.select_rows(unlabeled)?)?;
            // `unlabeled` is ascending, so local tie-breaking matches global.
            Ok(top_m(&least_confidence(&probs), quota)?.into_iter().map(|k| unlabeled[k]).collect())
        }
        AlMethod::Kcenters => {
            // Embeddings are recomputed for every point, labeled included.
            let embedded = model.embed(&train.features)?;
            Ok(greedy_kcenters(&embedded, labeled, quota)?.order)
        }
        AlMethod::Random => unreachable!("random rounds do not train a selector"),
    }
}

pub fn run_active_learning<T: Scalar, C: PhaseTimer>(
    cfg: &AlConfig,
    train: &Dataset<T>,
    test: &Dataset<T>,
    timer: &mut C,
) -> Result<RunReport> {
    check_pair(train, test)?;
    cfg.proxy.validate()?;
    cfg.target.validate()?;
    let n = train.len();
    let sizes = cfg.schedule.labeled_sizes(n, cfg.budget_fraction)?;

    let all: Vec<usize> = (0..n).collect();
    let mut labeled = random_select(&all, sizes[0], derive_seed(cfg.seed, INITIAL_POOL_STREAM))?;
    let mut in_pool = vec![false; n];
    labeled.iter().for_each(|&i| in_pool[i] = true);

    let mut rounds = vec![RoundRecord { round: 0, labeled: sizes[0], added: sizes[0], proxy_error: None }];
    let mut timing = RunTiming::default();

    for (k, window) in sizes.windows(2).enumerate() {
        let round = k + 1;
        let quota = window[1] - window[0];
        let unlabeled: Vec<usize> = (0..n).filter(|&i| !in_pool[i]).collect();

        let (picks, proxy_error, round_time) = if cfg.method == AlMethod::Random {
            let seed = derive_seed(cfg.seed, RANDOM_ROUND_STREAM + round as u64);
            (random_select(&unlabeled, quota, seed)?, None, RoundTiming::default())
        } else {
            let spec = cfg.proxy.with_seed(derive_seed(cfg.proxy.seed, PROXY_ROUND_STREAM + round as u64));
            let subset = train.subset(&sorted(&labeled))?;
            let (model, fit_secs) = timer.time(Phase::ProxyFit, || fit(&spec, &subset));
            let model = model?;
            let (picks, select_secs) =
                timer.time(Phase::Selection, || select_round(cfg.method, &model, train, &labeled, &unlabeled, quota));
            let error = model.error_rate(test)?;
            (picks?, Some(error), RoundTiming { proxy_fit_seconds: fit_secs, selection_seconds: select_secs })
        };

        for &i in &picks {
            debug_assert!(!in_pool[i], "example {i} selected twice");
            in_pool[i] = true;
        }
        labeled.extend_from_slice(&picks);
        debug_assert_eq!(labeled.len(), window[1]);
        rounds.push(RoundRecord { round, labeled: labeled.len(), added: picks.len(), proxy_error });
        timing.push(round_time);
    }

    let final_set = train.subset(&sorted(&labeled))?;
    let (target, target_secs) = timer.time(Phase::TargetFit, || fit(&cfg.target, &final_set));
    timing.target_fit_seconds = target_secs;
    let target_error = target?.error_rate(test)?;

    Ok(RunReport {
        outcome: RunOutcome {
            task: "al".into(),
            method: cfg.method.name().into(),
            rounds,
            selected: labeled,
            target_error,
            full_data_error: None,
        },
        timing,
    })
}

/// The classical baseline: the target model selects its own batches.
pub fn run_classical_active_learning<T: Scalar, C: PhaseTimer>(
    cfg: &AlConfig,
    train: &Dataset<T>,
    test: &Dataset<T>,
    timer: &mut C,
) -> Result<RunReport> {
    let baseline = AlConfig { proxy: cfg.target.clone(), ..cfg.clone() };
    run_active_learning(&baseline, train, test, timer)
}

pub fn run_coreset<T: Scalar, C: PhaseTimer>(
    cfg: &CoresetConfig,
    train: &Dataset<T>,
    test: &Dataset<T>,
    timer: &mut C,
) -> Result<RunReport> {
    check_pair(train, test)?;
    cfg.proxy.validate()?;
    cfg.target.validate()?;
    schedule::check_fraction("subset_fraction", cfg.subset_fraction)?;
    let n = train.len();
    let m = fraction_of(cfg.subset_fraction, n).max(1);
    let all: Vec<usize> = (0..n).collect();
    let stream_seed = derive_seed(cfg.seed, CORESET_STREAM);

    let mut round_time = RoundTiming::default();
    let (selected, proxy_error) = if cfg.method == CoresetMethod::Random {
        (random_select(&all, m, stream_seed)?, None)
    } else {
        let (proxy, fit_secs) = timer.time(Phase::ProxyFit, || fit(&cfg.proxy, train));
        let proxy = proxy?;
        let (picked, select_secs) = timer.time(Phase::Selection, || -> Result<Vec<usize>> {
            match cfg.method {
                CoresetMethod::Entropy => top_m(&entropy(&proxy.predict_proba(&train.features)?), m),
                CoresetMethod::Forgetting => {
                    let log = proxy.train_log.as_ref().ok_or_else(|| {
                        Error::Config("forgetting selection needs a proxy trained for at least one epoch".into())
                    })?;
                    select_most_forgotten(&process_log(log), m)
                }
                CoresetMethod::Kcenters => {
                    let start = SplitMix64::new(stream_seed).below(n);
                    let embedded = proxy.embed(&train.features)?;
                    let mut picked = vec![start];
                    picked.extend(greedy_kcenters(&embedded, &[start], m - 1)?.order);
                    Ok(picked)
                }
                CoresetMethod::Random => unreachable!(),
            }
        });
        round_time = RoundTiming { proxy_fit_seconds: fit_secs, selection_seconds: select_secs };
        (picked?, Some(proxy.error_rate(test)?))
    };
    let mut timing = RunTiming::default();
    timing.push(round_time);

    let subset = train.subset(&sorted(&selected))?;
    let (target, target_secs) = timer.time(Phase::TargetFit, || fit(&cfg.target, &subset));
    timing.target_fit_seconds = target_secs;
    let target_error = target?.error_rate(test)?;

    let full_data_error = if cfg.compare_full { Some(fit(&cfg.target, train)?.error_rate(test)?) } else { None };

    Ok(RunReport {
        outcome: RunOutcome {
            task: "coreset".into(),
            method: cfg.method.name().into(),
            rounds: vec![RoundRecord { round: 1, labeled: selected.len(), added: selected.len(), proxy_error }],
            selected,
            target_error,
            full_data_error,
        },
        timing,
    })
}

/// Spearman correlation between the entropy rankings that two models,
/// each trained on `train`, assign to the examples of `pool`.
pub fn entropy_rank_correlation<T: Scalar>(
    a: &LearnerSpec,
    b: &LearnerSpec,
    train: &Dataset<T>,
    pool: &crate::matrix::Matrix<T>,
) -> Result<f64> {
    let ha = entropy(&fit(a, train)?.predict_proba(pool)?);
    let hb = entropy(&fit(b, train)?.predict_proba(pool)?);
    spearman(&ha, &hb)
}

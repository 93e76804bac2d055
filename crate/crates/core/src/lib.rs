//! Data selection via proxy models.
//!
//! The crate bundles the selection primitives (uncertainty scores, greedy
//! k-centers, forgetting events), rank-correlation diagnostics, two small
//! reference learners that play the proxy and target roles, and a harness
//! that runs pool-based active learning and core-set selection end to end.
//!
//! Numerical code is generic over [`Scalar`], implemented for `f32` and
//! `f64`. The aliases below fix the common instantiations.

pub mod error;
pub mod forgetting;
pub mod harness;
pub mod kcenters;
pub mod learner;
pub mod matrix;
pub mod ranking;
pub mod rng;
pub mod scalar;
pub mod scoring;
pub mod tensor_io;

pub use error::{Error, Result};
pub use forgetting::{ForgettingScore, ForgettingState, TrainLog};
pub use kcenters::KCentersResult;
pub use matrix::{Matrix, ProbMatrix};
pub use ranking::Ranking;
pub use rng::SplitMix64;
pub use scalar::Scalar;
pub use scoring::ScoreVector;

/// Single-precision feature matrix, the in-memory form of an SVPT file.
pub type FeatureMatrixF32 = Matrix<f32>;
/// Double-precision feature matrix used by the learners and harness.
pub type FeatureMatrix = Matrix<f64>;
pub type ProbMatrixF32 = ProbMatrix<f32>;
pub type ProbMatrixF64 = ProbMatrix<f64>;
pub type Scores = ScoreVector<f64>;
pub type Dataset = learner::Dataset<f64>;
pub type TrainedModel = learner::TrainedModel<f64>;
pub type RunReport = harness::RunReport;

//! Desk-scale learners that play the proxy and target roles.
//!
//! A [`LearnerSpec`] picks the capacity (logistic regression or a one-hidden
//! layer ReLU network) and the epoch budget; [`fit`] trains from scratch
//! with plain mini-batch SGD on cross-entropy. Training is a pure function
//! of the spec and the data.

mod network;
pub mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forgetting::{streaming_update, ForgettingState, TrainLog};
use crate::matrix::{Matrix, ProbMatrix};
use crate::rng::{derive_seed, SplitMix64};
use crate::scalar::Scalar;

pub use network::{Architecture, BatchGradient, Network};
pub use synthetic::{make_blobs, make_synthetic, Blob, SyntheticDataset, SyntheticParams};

const INIT_STREAM: u64 = 1;
const SHUFFLE_STREAM: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearnerKind {
    Logistic,
    Mlp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    /// Hidden width; ignored for logistic regression.
    #[serde(default)]
    pub hidden_units: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl LearnerSpec {
    pub fn logistic(epochs: usize, learning_rate: f64, batch_size: usize, seed: u64) -> Self {
        Self { kind: LearnerKind::Logistic, hidden_units: 0, epochs, learning_rate, batch_size, seed }
    }

    pub fn mlp(hidden_units: usize, epochs: usize, learning_rate: f64, batch_size: usize, seed: u64) -> Self {
        Self { kind: LearnerKind::Mlp, hidden_units, epochs, learning_rate, batch_size, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.kind == LearnerKind::Mlp && self.hidden_units == 0 {
            return Err(Error::Config("mlp needs hidden_units >= 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        Ok(())
    }

    pub fn architecture(&self, dim: usize, classes: usize) -> Architecture {
        match self.kind {
            LearnerKind::Logistic => Architecture::Logistic { dim, classes },
            LearnerKind::Mlp => Architecture::Mlp { dim, hidden: self.hidden_units, classes },
        }
    }
}

/// Labeled examples: one label in `[0, classes)` per feature row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub features: Matrix<T>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(features: Matrix<T>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Shape(format!("{} labels for {} feature rows", labels.len(), features.rows())));
        }
        if classes < 2 {
            return Err(Error::Config(format!("need at least 2 classes, got {classes}")));
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::InvalidLabel { label, classes });
        }
        Ok(Self { features, labels, classes })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Config("cannot train on an empty subset".into()));
        }
        Ok(Self {
            features: self.features.select_rows(indices)?,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
        })
    }

    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        Dataset { features: self.features.cast(), labels: self.labels.clone(), classes: self.classes }
    }
}

#[derive(Clone, Debug)]
pub struct TrainedModel<T> {
    pub spec: LearnerSpec,
    pub network: Network<T>,
    /// Correctness per example per epoch, observed before each gradient
    /// step. `None` when `epochs == 0`.
    pub train_log: Option<TrainLog>,
    /// Forgetting statistics accumulated online during training.
    pub forgetting: Vec<ForgettingState>,
    /// Mean pre-update mini-batch loss for each epoch.
    pub epoch_losses: Vec<f64>,
}

/// Trains a fresh model on `data`.
///
/// Each epoch visits the examples in a seeded shuffled order, in batches of
/// `batch_size`. For every batch the forward pass records each example's
/// correctness before the SGD step is applied.
pub fn fit<T: Scalar>(spec: &LearnerSpec, data: &Dataset<T>) -> Result<TrainedModel<T>> {
    spec.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(Error::Config("empty training set".into()));
    }
    let arch = spec.architecture(data.features.cols(), data.classes);
    let mut network = Network::init(arch, &mut SplitMix64::new(derive_seed(spec.seed, INIT_STREAM)));
    let mut shuffle_rng = SplitMix64::new(derive_seed(spec.seed, SHUFFLE_STREAM));
    let lr = T::of(spec.learning_rate);

    let mut log = vec![false; n * spec.epochs];
    let mut forgetting = vec![ForgettingState::default(); n];
    let mut epoch_losses = Vec::with_capacity(spec.epochs);
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..spec.epochs {
        shuffle_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(spec.batch_size) {
            let step = network.batch_gradient(&data.features, &data.labels, batch);
            for (&i, &ok) in batch.iter().zip(&step.correct) {
                log[i * spec.epochs + epoch] = ok;
                forgetting[i] = streaming_update(forgetting[i], ok);
            }
            network.sgd_step(&step.grad, lr);
            loss_sum += step.loss.as_f64();
            batches += 1;
        }
        epoch_losses.push(loss_sum / batches as f64);
    }

    let train_log = (spec.epochs > 0).then(|| TrainLog::from_bits(n, spec.epochs, log)).transpose()?;
    Ok(TrainedModel { spec: spec.clone(), network, train_log, forgetting, epoch_losses })
}

impl<T: Scalar> TrainedModel<T> {
    fn check_dim(&self, features: &Matrix<T>) -> Result<()> {
        let dim = self.network.arch().dim();
        if features.cols() != dim {
            return Err(Error::Shape(format!("model expects {dim} features, got {}", features.cols())));
        }
        Ok(())
    }

    pub fn predict_proba(&self, features: &Matrix<T>) -> Result<ProbMatrix<T>> {
        self.check_dim(features)?;
        let c = self.network.arch().classes();
        let mut data = Vec::with_capacity(features.rows() * c);
        for x in features.iter_rows() {
            data.extend(self.network.probabilities(x));
        }
        Ok(ProbMatrix::from_softmax(Matrix::from_raw(features.rows(), c, data)))
    }

    pub fn embed(&self, features: &Matrix<T>) -> Result<Matrix<T>> {
        self.check_dim(features)?;
        let width = self.network.arch().embedding_dim();
        let mut data = Vec::with_capacity(features.rows() * width);
        for x in features.iter_rows() {
            data.extend(self.network.embedding(x));
        }
        Ok(Matrix::from_raw(features.rows(), width, data))
    }

    pub fn predict(&self, features: &Matrix<T>) -> Result<Vec<usize>> {
        self.check_dim(features)?;
        Ok(features.iter_rows().map(|x| network::argmax(&self.network.logits(x))).collect())
    }

    /// Fraction of misclassified examples.
    pub fn error_rate(&self, data: &Dataset<T>) -> Result<f64> {
        let pred = self.predict(&data.features)?;
        let wrong = pred.iter().zip(&data.labels).filter(|(p, y)| p != y).count();
        Ok(wrong as f64 / data.len() as f64)
    }

    /// Parameters as a single-row matrix, for export.
    pub fn parameter_matrix(&self) -> Matrix<T> {
        let p = self.network.params();
        Matrix::from_raw(1, p.len(), p.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset<f64> {
        let f = Matrix::from_rows(&[[0.0, 0.0], [0.1, 0.2], [5.0, 5.0], [5.2, 4.9]]).unwrap();
        Dataset::new(f, vec![0, 0, 1, 1], 2).unwrap()
    }

    #[test]
    fn zero_epochs_logistic_is_uniform() {
        let m = fit(&LearnerSpec::logistic(0, 0.1, 2, 1), &toy()).unwrap();
        let p = m.predict_proba(&toy().features).unwrap();
        assert!(p.iter_rows().all(|r| r == [0.5, 0.5]));
        assert!(m.train_log.is_none());
    }

    #[test]
    fn deterministic_fit() {
        let spec = LearnerSpec::mlp(4, 5, 0.1, 2, 9);
        let a = fit(&spec, &toy()).unwrap();
        let b = fit(&spec, &toy()).unwrap();
        assert_eq!(a.network, b.network);
        assert_eq!(a.train_log, b.train_log);
        let c = fit(&spec.with_seed(10), &toy()).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn embed_shapes() {
        let d = toy();
        let lin = fit(&LearnerSpec::logistic(3, 0.1, 2, 1), &d).unwrap();
        assert_eq!(lin.embed(&d.features).unwrap(), d.features);
        let mlp = fit(&LearnerSpec::mlp(7, 3, 0.1, 2, 1), &d).unwrap();
        let e = mlp.embed(&d.features).unwrap();
        assert_eq!((e.rows(), e.cols()), (4, 7));
        assert!(e.data().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn spec_and_data_errors() {
        let d = toy();
        assert!(fit(&LearnerSpec::logistic(1, 0.1, 0, 1), &d).is_err());
        assert!(fit(&LearnerSpec::mlp(0, 1, 0.1, 1, 1), &d).is_err());
        assert!(fit(&LearnerSpec::logistic(1, -1.0, 1, 1), &d).is_err());
        assert!(Dataset::new(d.features.clone(), vec![0, 1], 2).is_err());
        assert!(matches!(Dataset::new(d.features.clone(), vec![0, 1, 2, 0], 2), Err(Error::InvalidLabel { .. })));
        let m = fit(&LearnerSpec::logistic(1, 0.1, 1, 1), &d).unwrap();
        let wrong = Matrix::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(m.predict_proba(&wrong), Err(Error::Shape(_))));
        assert!(matches!(m.embed(&wrong), Err(Error::Shape(_))));
    }

    #[test]
    fn spec_json_shape() {
        let spec: LearnerSpec = serde_json::from_str(
            r#"{"kind":"mlp","hidden_units":16,"epochs":20,"learning_rate":0.05,"batch_size":32,"seed":3}"#,
        )
        .unwrap();
        assert_eq!(spec, LearnerSpec::mlp(16, 20, 0.05, 32, 3));
        let lin: LearnerSpec =
            serde_json::from_str(r#"{"kind":"logistic","epochs":1,"learning_rate":0.1,"batch_size":1,"seed":0}"#)
                .unwrap();
        assert_eq!(lin.hidden_units, 0);
    }
}

//! Training procedures sharing one configuration, trace and model type.
//!
//! * [`train_foxann`]: FOX searches the flat weight vector of a sigmoid
//!   network, minimizing squared error on the training split.
//! * [`train_backprop`]: the same network trained by online gradient descent
//!   with the generalized delta rule.
//! * [`train_logreg`]: multinomial logistic regression by full-batch
//!   gradient descent.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{one_hot_matrix, Matrix, Scaler};
use crate::error::{Error, Result};
use crate::fox::{ASchedule, ExplorationRule};
use crate::mlp::{self, Network, Scratch, Topology};

mod backprop;
mod foxann;
mod logreg;

pub use backprop::{loss_gradient, train_backprop};
pub use foxann::{foxann_objective, train_foxann};
pub use logreg::train_logreg;

/// How squared error is reduced to a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    /// Sum of squared residuals over `N * C` entries, divided by `N * C`.
    #[default]
    Mean,
    /// Half the sum of squared residuals.
    HalfSum,
}

impl LossMode {
    fn reduce(self, sum_sq: f64, entries: usize) -> f64 {
        match self {
            LossMode::Mean => {
                if entries == 0 {
                    0.0
                } else {
                    sum_sq / entries as f64
                }
            }
            LossMode::HalfSum => 0.5 * sum_sq,
        }
    }
}

/// Squared-error loss between one-hot `targets` and network `outputs`.
pub fn loss(targets: &Matrix, outputs: &Matrix, mode: LossMode) -> Result<f64> {
    if targets.rows() != outputs.rows() || targets.cols() != outputs.cols() {
        return Err(Error::LengthMismatch {
            what: "outputs (rows x cols)",
            expected: targets.rows() * targets.cols(),
            actual: outputs.rows() * outputs.cols(),
        });
    }
    let sum_sq = sum_squared(targets.values(), outputs.values());
    Ok(mode.reduce(sum_sq, targets.values().len()))
}

fn sum_squared(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Features with labels and the matching one-hot targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub targets: Matrix,
}

impl Samples {
    pub fn new(features: Matrix, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: features.rows(),
                actual: labels.len(),
            });
        }
        let targets = one_hot_matrix(&labels, n_classes)?;
        Ok(Self {
            features,
            labels,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.targets.cols()
    }
}

/// Squared-error loss of a sigmoid network given as a flat slice.
pub(crate) fn network_loss(
    topology: &Topology,
    params: &[f64],
    samples: &Samples,
    mode: LossMode,
) -> f64 {
    let mut scratch = Scratch::new(topology);
    let mut sum_sq = 0.0;
    for (x, y) in samples.features.iter_rows().zip(samples.targets.iter_rows()) {
        let out = mlp::forward_flat(topology, params, x, &mut scratch);
        sum_sq += sum_squared(y, out);
    }
    mode.reduce(sum_sq, samples.targets.values().len())
}

/// Knobs shared by the three trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Lower bound for initial (and, for FOXANN, all) weights.
    pub weight_low: f64,
    pub weight_high: f64,
    /// FOXANN only.
    pub population_size: usize,
    /// Backprop and logistic regression only.
    pub learning_rate: f64,
    pub seed: u64,
    pub loss_mode: LossMode,
    /// FOXANN only.
    pub a_schedule: ASchedule,
    /// FOXANN only.
    pub exploration: ExplorationRule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            weight_low: -3.0,
            weight_high: 3.0,
            population_size: 30,
            learning_rate: 0.5,
            seed: 0,
            loss_mode: LossMode::Mean,
            a_schedule: ASchedule::Decreasing,
            exploration: ExplorationRule::GaussianWalk,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !(self.weight_low < self.weight_high) {
            return Err(Error::InvalidParameter(format!(
                "weight bounds must satisfy low < high, got {}..{}",
                self.weight_low, self.weight_high
            )));
        }
        // zero is accepted: it freezes the initial weights
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be non-negative, got {}",
                self.learning_rate
            )));
        }
        if self.population_size == 0 {
            return Err(Error::InvalidParameter("population size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-epoch training and validation loss.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochTrace {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
}

impl EpochTrace {
    pub fn with_capacity(epochs: usize) -> Self {
        Self {
            train_loss: Vec::with_capacity(epochs),
            val_loss: Vec::with_capacity(epochs),
        }
    }

    pub fn len(&self) -> usize {
        self.train_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_loss.is_empty()
    }

    pub fn push(&mut self, train: f64, val: f64) {
        self.train_loss.push(train);
        self.val_loss.push(val);
    }

    /// `epoch,train_loss,val_loss` with epochs numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for (i, (t, v)) in self.train_loss.iter().zip(&self.val_loss).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, t, v));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Foxann,
    /// Backpropagation-trained network.
    Ann,
    Logreg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Foxann, ModelKind::Ann, ModelKind::Logreg];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Foxann => "foxann",
            ModelKind::Ann => "ann",
            ModelKind::Logreg => "logreg",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Foxann => "FOXANN",
            ModelKind::Ann => "ANN",
            ModelKind::Logreg => "LR",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "foxann" | "fox" => Ok(ModelKind::Foxann),
            "ann" | "backprop" => Ok(ModelKind::Ann),
            "logreg" | "lr" => Ok(ModelKind::Logreg),
            _ => Err(Error::UnknownModel { name: s.into() }),
        }
    }
}

/// A trained classifier.
///
/// Network models store their flat parameter vector over `topology`. The
/// logistic-regression model uses the same layout over the single layer
/// `[n_features, n_classes]` but applies softmax instead of sigmoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub topology: Topology,
    pub weights: Vec<f64>,
    pub train_loss: f64,
    pub val_loss: f64,
}

impl TrainedModel {
    pub fn network(&self) -> Option<Network> {
        match self.kind {
            ModelKind::Logreg => None,
            _ => Network::unflatten(&self.weights, &self.topology).ok(),
        }
    }

    /// Per-class outputs in `(0, 1)`: sigmoid activations for networks,
    /// softmax probabilities for logistic regression.
    pub fn outputs(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.topology.n_inputs() {
            return Err(Error::LengthMismatch {
                what: "model input",
                expected: self.topology.n_inputs(),
                actual: input.len(),
            });
        }
        Ok(match self.kind {
            ModelKind::Logreg => logreg::probabilities(&self.weights, &self.topology, input),
            _ => {
                let mut scratch = Scratch::new(&self.topology);
                mlp::forward_flat(&self.topology, &self.weights, input, &mut scratch).to_vec()
            }
        })
    }

    pub fn output_matrix(&self, features: &Matrix) -> Result<Matrix> {
        let mut out = Matrix::zeros(features.rows(), self.topology.n_outputs());
        for (i, x) in features.iter_rows().enumerate() {
            out.row_mut(i).copy_from_slice(&self.outputs(x)?);
        }
        Ok(out)
    }

    pub fn predict(&self, input: &[f64]) -> Result<usize> {
        self.outputs(input).map(|o| mlp::argmax(&o))
    }

    pub fn predict_all(&self, features: &Matrix) -> Result<Vec<usize>> {
        features.iter_rows().map(|x| self.predict(x)).collect()
    }

    /// Squared-error loss of the model's outputs against `samples`.
    pub fn loss_on(&self, samples: &Samples, mode: LossMode) -> Result<f64> {
        loss(&samples.targets, &self.output_matrix(&samples.features)?, mode)
    }
}

/// On-disk model: the trained parameters plus what is needed to apply them
/// to raw feature rows.
///
/// ```json
/// {
///   "format": "foxann-model/1",
///   "kind": "foxann",
///   "topology": [4, 8, 2, 3],
///   "weights": [...],
///   "train_loss": 0.01, "val_loss": 0.02,
///   "scaler": {"min": [...], "max": [...]},
///   "class_names": ["setosa", "versicolor", "virginica"]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format: String,
    #[serde(flatten)]
    pub model: TrainedModel,
    pub scaler: Option<Scaler>,
    pub class_names: Vec<String>,
}

pub const MODEL_FORMAT: &str = "foxann-model/1";

impl SavedModel {
    pub fn new(model: TrainedModel, scaler: Option<Scaler>, class_names: Vec<String>) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            model,
            scaler,
            class_names,
        }
    }

    /// Scales a raw row (if a scaler was saved) and predicts its class index.
    pub fn predict_raw(&self, raw: &[f64]) -> Result<usize> {
        let mut row = raw.to_vec();
        if let Some(s) = &self.scaler {
            s.transform_row(&mut row);
        }
        self.model.predict(&row)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            context: "model".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let saved: SavedModel = serde_json::from_str(s).map_err(|e| Error::Format {
            context: "model".into(),
            message: e.to_string(),
        })?;
        if saved.format != MODEL_FORMAT {
            return Err(Error::Format {
                context: "model".into(),
                message: format!("unsupported format `{}`", saved.format),
            });
        }
        let expected = saved.model.topology.weight_count();
        if saved.model.weights.len() != expected {
            return Err(Error::LengthMismatch {
                what: "saved weights",
                expected,
                actual: saved.model.weights.len(),
            });
        }
        Ok(saved)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

pub(crate) fn check_splits(train: &Samples, val: &Samples, n_inputs: usize) -> Result<()> {
    if train.is_empty() {
        return Err(Error::InvalidParameter("training split is empty".into()));
    }
    for (what, s) in [("training features", train), ("validation features", val)] {
        if s.n_features() != n_inputs {
            return Err(Error::LengthMismatch {
                what,
                expected: n_inputs,
                actual: s.n_features(),
            });
        }
    }
    if train.n_classes() != val.n_classes() {
        return Err(Error::LengthMismatch {
            what: "validation classes",
            expected: train.n_classes(),
            actual: val.n_classes(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<f64>]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn loss_hand_values() {
        let y = m(&[vec![1.0, 0.0, 0.0]]);
        let o = m(&[vec![0.5, 0.5, 0.5]]);
        assert_eq!(loss(&y, &y, LossMode::Mean).unwrap(), 0.0);
        assert_eq!(loss(&y, &y, LossMode::HalfSum).unwrap(), 0.0);
        assert_eq!(loss(&y, &o, LossMode::HalfSum).unwrap(), 0.375);
        assert_eq!(loss(&y, &o, LossMode::Mean).unwrap(), 0.25);
        let y = m(&[vec![1.0, 0.0]]);
        let o = m(&[vec![0.0, 1.0]]);
        assert_eq!(loss(&y, &o, LossMode::HalfSum).unwrap(), 1.0);
        assert_eq!(loss(&y, &o, LossMode::Mean).unwrap(), 1.0);
        assert!(loss(&y, &m(&[vec![0.0, 1.0, 0.0]]), LossMode::Mean).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig {
            weight_low: 1.0,
            weight_high: 1.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn trace_csv() {
        let mut t = EpochTrace::default();
        t.push(0.5, 0.25);
        t.push(0.125, 0.2);
        assert_eq!(t.to_csv(), "epoch,train_loss,val_loss\n1,0.5,0.25\n2,0.125,0.2\n");
    }

    #[test]
    fn model_kind_names() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("svm".parse::<ModelKind>().is_err());
    }
}

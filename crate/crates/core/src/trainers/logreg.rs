use crate::error::{Error, Result};
use crate::mlp::{layer_views, Topology};
use crate::trainers::{check_splits, loss, EpochTrace, ModelKind, Samples, TrainConfig, TrainedModel};
use crate::data::Matrix;

/// Softmax of the linear scores `b + x W`.
pub(crate) fn probabilities(params: &[f64], topology: &Topology, input: &[f64]) -> Vec<f64> {
    let layer = layer_views(topology, params).next().expect("one layer");
    let mut scores = layer.biases.to_vec();
    for (&x, row) in input.iter().zip(layer.weights.chunks_exact(layer.n_out)) {
        for (s, &w) in scores.iter_mut().zip(row) {
            *s += x * w;
        }
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        total += *s;
    }
    for s in scores.iter_mut() {
        *s /= total;
    }
    scores
}

fn probability_matrix(params: &[f64], topology: &Topology, features: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(features.rows(), topology.n_outputs());
    for (i, x) in features.iter_rows().enumerate() {
        out.row_mut(i)
            .copy_from_slice(&probabilities(params, topology, x));
    }
    out
}

/// Multinomial logistic regression by full-batch gradient descent on the
/// mean cross-entropy, starting from zero weights. The trace reports the
/// squared error of the predicted probabilities so it is comparable with the
/// network trainers.
pub fn train_logreg(
    train: &Samples,
    val: &Samples,
    n_classes: usize,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, EpochTrace)> {
    cfg.validate()?;
    if n_classes < 2 {
        return Err(Error::TooFewClasses(n_classes));
    }
    let n_features = train.n_features();
    let topology = Topology::new(vec![n_features, n_classes])?;
    check_splits(train, val, n_features)?;
    if train.n_classes() != n_classes {
        return Err(Error::LengthMismatch {
            what: "target classes",
            expected: n_classes,
            actual: train.n_classes(),
        });
    }

    let mut params = vec![0.0; topology.weight_count()];
    let mut grad = vec![0.0; params.len()];
    let bias_offset = n_features * n_classes;
    let n = train.len() as f64;
    let mut trace = EpochTrace::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        grad.fill(0.0);
        for (x, y) in train.features.iter_rows().zip(train.targets.iter_rows()) {
            let p = probabilities(&params, &topology, x);
            for (j, (&pj, &yj)) in p.iter().zip(y).enumerate() {
                let err = pj - yj;
                for (i, &xi) in x.iter().enumerate() {
                    grad[i * n_classes + j] += xi * err;
                }
                grad[bias_offset + j] += err;
            }
        }
        for (w, g) in params.iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * g / n;
        }

        let train_loss = loss(
            &train.targets,
            &probability_matrix(&params, &topology, &train.features),
            cfg.loss_mode,
        )?;
        let val_loss = if val.is_empty() {
            0.0
        } else {
            loss(
                &val.targets,
                &probability_matrix(&params, &topology, &val.features),
                cfg.loss_mode,
            )?
        };
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::NonFiniteLoss {
                trainer: "logreg",
                epoch,
            });
        }
        trace.push(train_loss, val_loss);
    }

    let model = TrainedModel {
        kind: ModelKind::Logreg,
        topology,
        train_loss: *trace.train_loss.last().unwrap(),
        val_loss: *trace.val_loss.last().unwrap(),
        weights: params,
    };
    Ok((model, trace))
}

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mlp::{layer_views, Network, Topology};
use crate::seed;
use crate::trainers::{check_splits, network_loss, EpochTrace, ModelKind, Samples, TrainConfig, TrainedModel};

const INIT_STREAM: u64 = 0xb4c0;

/// Forward activations and backward deltas for one sample.
struct Workspace {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Vec<f64>>,
    /// `deltas[l]` is `-dE/dnet` for the units of layer `l`.
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(topology: &Topology) -> Self {
        Self {
            acts: topology.layer_sizes().iter().map(|&n| vec![0.0; n]).collect(),
            deltas: topology.layers().map(|(_, n)| vec![0.0; n]).collect(),
        }
    }

    /// Adds the gradient of `E = 1/2 sum (y - out)^2` for one sample to `grad`.
    fn accumulate_gradient(
        &mut self,
        topology: &Topology,
        params: &[f64],
        input: &[f64],
        target: &[f64],
        grad: &mut [f64],
    ) {
        let layers: Vec<_> = layer_views(topology, params).collect();
        self.acts[0].copy_from_slice(input);
        for (l, layer) in layers.iter().enumerate() {
            let (prev, rest) = self.acts.split_at_mut(l + 1);
            let x = &prev[l];
            let out = &mut rest[0];
            out.copy_from_slice(layer.biases);
            for (&xi, row) in x.iter().zip(layer.weights.chunks_exact(layer.n_out)) {
                for (o, &w) in out.iter_mut().zip(row) {
                    *o += xi * w;
                }
            }
            for o in out.iter_mut() {
                *o = crate::mlp::sigmoid(*o);
            }
        }

        // output deltas: (y - out) * f'(net), with f' = out (1 - out)
        let last = layers.len() - 1;
        for ((d, &o), &y) in self.deltas[last]
            .iter_mut()
            .zip(&self.acts[last + 1])
            .zip(target)
        {
            *d = (y - o) * o * (1.0 - o);
        }
        // generalized delta rule for hidden layers
        for l in (0..last).rev() {
            let next = &layers[l + 1];
            let (cur, after) = self.deltas.split_at_mut(l + 1);
            for (h, d) in cur[l].iter_mut().enumerate() {
                let a = self.acts[l + 1][h];
                let row = &next.weights[h * next.n_out..(h + 1) * next.n_out];
                let back: f64 = row.iter().zip(&after[0]).map(|(w, dj)| w * dj).sum();
                *d = a * (1.0 - a) * back;
            }
        }

        // dE/dw_ij = -x_i * delta_j, dE/db_j = -delta_j
        let mut offset = 0;
        for (l, layer) in layers.iter().enumerate() {
            let delta = &self.deltas[l];
            for (i, &xi) in self.acts[l].iter().enumerate() {
                let g = &mut grad[offset + i * layer.n_out..offset + (i + 1) * layer.n_out];
                for (gij, &dj) in g.iter_mut().zip(delta) {
                    *gij -= xi * dj;
                }
            }
            offset += layer.n_in * layer.n_out;
            for (gb, &dj) in grad[offset..offset + layer.n_out].iter_mut().zip(delta) {
                *gb -= dj;
            }
            offset += layer.n_out;
        }
    }
}

/// Gradient of the half-sum squared error over all of `samples` with
/// respect to the flat parameters of `network`.
pub fn loss_gradient(network: &Network, samples: &Samples) -> Result<Vec<f64>> {
    let topology = network.topology();
    check_splits(samples, samples, topology.n_inputs())?;
    let mut ws = Workspace::new(topology);
    let mut grad = vec![0.0; topology.weight_count()];
    for (x, y) in samples.features.iter_rows().zip(samples.targets.iter_rows()) {
        ws.accumulate_gradient(topology, network.params(), x, y, &mut grad);
    }
    Ok(grad)
}

/// Online backpropagation: per epoch the training samples are visited in a
/// freshly shuffled order and every sample applies `w += lr * x * delta`.
pub fn train_backprop(
    train: &Samples,
    val: &Samples,
    topology: &Topology,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, EpochTrace)> {
    cfg.validate()?;
    check_splits(train, val, topology.n_inputs())?;

    let mut init = seed::rng(seed::derive(cfg.seed, &[INIT_STREAM]));
    let mut params: Vec<f64> = (0..topology.weight_count())
        .map(|_| init.random_range(cfg.weight_low..=cfg.weight_high))
        .collect();

    let mut ws = Workspace::new(topology);
    let mut grad = vec![0.0; params.len()];
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut trace = EpochTrace::with_capacity(cfg.epochs);
    let eta = cfg.learning_rate;
    for epoch in 0..cfg.epochs {
        let mut rng = seed::rng(seed::derive(cfg.seed, &[epoch as u64]));
        order.shuffle(&mut rng);
        for &i in &order {
            grad.fill(0.0);
            ws.accumulate_gradient(
                topology,
                &params,
                train.features.row(i),
                train.targets.row(i),
                &mut grad,
            );
            for (w, g) in params.iter_mut().zip(&grad) {
                *w -= eta * g;
            }
        }
        let train_loss = network_loss(topology, &params, train, cfg.loss_mode);
        let val_loss = if val.is_empty() {
            0.0
        } else {
            network_loss(topology, &params, val, cfg.loss_mode)
        };
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::NonFiniteLoss {
                trainer: "backprop",
                epoch,
            });
        }
        trace.push(train_loss, val_loss);
    }

    let model = TrainedModel {
        kind: ModelKind::Ann,
        topology: topology.clone(),
        train_loss: *trace.train_loss.last().unwrap(),
        val_loss: *trace.val_loss.last().unwrap(),
        weights: params,
    };
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn toy() -> Samples {
        let rows = vec![vec![0.1, 0.9], vec![0.8, 0.2], vec![0.5, 0.4], vec![0.0, 1.0]];
        Samples::new(Matrix::from_rows(&rows).unwrap(), vec![0, 1, 1, 0], 2).unwrap()
    }

    #[test]
    fn zero_learning_rate_keeps_initial_weights() {
        let t = Topology::for_classification(2, 2).unwrap();
        let frozen = TrainConfig {
            learning_rate: 0.0,
            epochs: 5,
            seed: 11,
            ..TrainConfig::default()
        };
        let one = TrainConfig {
            epochs: 1,
            ..frozen.clone()
        };
        let (a, trace) = train_backprop(&toy(), &toy(), &t, &frozen).unwrap();
        let (b, _) = train_backprop(&toy(), &toy(), &t, &one).unwrap();
        assert_eq!(a.weights, b.weights);
        assert!(trace.train_loss.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn training_reduces_loss() {
        let t = Topology::for_classification(2, 2).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 200,
            seed: 2,
            ..TrainConfig::default()
        };
        let (_, trace) = train_backprop(&toy(), &toy(), &t, &cfg).unwrap();
        assert!(trace.train_loss.last().unwrap() < &trace.train_loss[0]);
        assert!(trace.train_loss.iter().all(|l| l.is_finite() && *l >= 0.0));
    }
}

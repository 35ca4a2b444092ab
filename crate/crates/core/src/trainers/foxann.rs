use crate::error::{Error, Result};
use crate::fox::{self, FoxParams, SearchBounds};
use crate::mlp::Topology;
use crate::trainers::{check_splits, network_loss, EpochTrace, LossMode, ModelKind, Samples, TrainConfig, TrainedModel};

/// Mean squared error of the network encoded by `weights` over `samples`.
pub fn foxann_objective(weights: &[f64], topology: &Topology, samples: &Samples) -> Result<f64> {
    if weights.len() != topology.weight_count() {
        return Err(Error::LengthMismatch {
            what: "weight vector",
            expected: topology.weight_count(),
            actual: weights.len(),
        });
    }
    check_splits(samples, samples, topology.n_inputs())?;
    Ok(network_loss(topology, weights, samples, LossMode::Mean))
}

/// Trains a network by letting FOX minimize the training loss over the flat
/// weight vector. One epoch is one FOX iteration. The trace holds the
/// best-so-far training loss and the validation loss of those best weights.
pub fn train_foxann(
    train: &Samples,
    val: &Samples,
    topology: &Topology,
    cfg: &TrainConfig,
) -> Result<(TrainedModel, EpochTrace)> {
    cfg.validate()?;
    check_splits(train, val, topology.n_inputs())?;
    if train.n_classes() != topology.n_outputs() {
        return Err(Error::LengthMismatch {
            what: "network outputs",
            expected: train.n_classes(),
            actual: topology.n_outputs(),
        });
    }

    let bounds = SearchBounds::uniform(topology.weight_count(), cfg.weight_low, cfg.weight_high)?;
    let params = FoxParams {
        population_size: cfg.population_size,
        max_iterations: cfg.epochs,
        a_schedule: cfg.a_schedule,
        exploration: cfg.exploration,
        ..FoxParams::default()
    };
    let mode = cfg.loss_mode;
    let val_loss_of = |w: &[f64]| {
        if val.is_empty() {
            0.0
        } else {
            network_loss(topology, w, val, mode)
        }
    };

    let mut trace = EpochTrace::with_capacity(cfg.epochs);
    let mut last_best: Option<(f64, f64)> = None;
    let result = fox::optimize_observed(
        |w| network_loss(topology, w, train, mode),
        &bounds,
        &params,
        cfg.seed,
        |_, pop| {
            // the incumbent only changes on strict improvement
            let val_loss = match last_best {
                Some((fit, v)) if fit == pop.best_fitness => v,
                _ => val_loss_of(&pop.best_position),
            };
            last_best = Some((pop.best_fitness, val_loss));
            trace.push(pop.best_fitness, val_loss);
        },
    )?;

    let model = TrainedModel {
        kind: ModelKind::Foxann,
        topology: topology.clone(),
        train_loss: result.best_fitness,
        val_loss: val_loss_of(&result.best_position),
        weights: result.best_position,
    };
    Ok((model, trace))
}

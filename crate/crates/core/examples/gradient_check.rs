//! Compare backprop's analytic gradient with central differences of the
//! network loss on the smallest bundled topology.
//!
//!     cargo run --release --example gradient_check

use foxann::data::Matrix;
use foxann::mlp::{Network, Topology};
use foxann::trainers::{loss_gradient, LossMode, ModelKind, Samples, TrainedModel};
use rand::Rng;

fn main() -> foxann::Result<()> {
    let topology = Topology::for_classification(4, 3)?;
    let samples = Samples::new(
        Matrix::from_rows(&[vec![0.1, 0.9, 0.4, 0.3], vec![0.8, 0.2, 0.7, 0.5], vec![0.5, 0.5, 0.1, 0.9]])?,
        vec![0, 1, 2],
        3,
    )?;
    let mut rng = foxann::seed::rng(42);
    let weights: Vec<f64> = (0..topology.weight_count()).map(|_| rng.random_range(-1.5..1.5)).collect();

    let analytic = loss_gradient(&Network::unflatten(&weights, &topology)?, &samples)?;
    // loss_gradient differentiates the half-sum loss
    let loss_at = |w: Vec<f64>| {
        TrainedModel {
            kind: ModelKind::Ann,
            topology: topology.clone(),
            weights: w,
            train_loss: 0.0,
            val_loss: 0.0,
        }
        .loss_on(&samples, LossMode::HalfSum)
    };

    let h = 1e-5;
    let mut worst = (0.0f64, 0);
    for k in 0..weights.len() {
        let (mut plus, mut minus) = (weights.clone(), weights.clone());
        plus[k] += h;
        minus[k] -= h;
        let numeric = (loss_at(plus)? - loss_at(minus)?) / (2.0 * h);
        let rel = (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(1e-8);
        if rel > worst.0 {
            worst = (rel, k);
        }
    }
    println!(
        "{} parameters, worst relative error {:.2e} at index {}",
        weights.len(),
        worst.0,
        worst.1
    );
    Ok(())
}

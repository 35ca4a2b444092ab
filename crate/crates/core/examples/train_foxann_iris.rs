//! Train one FOXANN network on an 80/20 split of Iris and inspect the result.
//!
//!     cargo run --release --example train_foxann_iris

use foxann::data::{self, Bundled, Scaler};
use foxann::metrics;
use foxann::mlp::Topology;
use foxann::trainers::{train_foxann, Samples, TrainConfig};

fn main() -> foxann::Result<()> {
    let iris = Bundled::Iris.load();
    let scaler = Scaler::fit(&iris.features);
    let features = scaler.apply(&iris.features);

    // fold 0 of a 5-fold split is a stratified 80/20 holdout
    let split = &data::stratified_k_fold(&iris, 5, 1)?[0];
    let pick = |idx: &[usize]| {
        let labels = idx.iter().map(|&i| iris.labels[i]).collect();
        Samples::new(features.select_rows(idx), labels, iris.n_classes())
    };
    let (train, val) = (pick(&split.train_indices)?, pick(&split.val_indices)?);

    let topology = Topology::for_classification(iris.n_features(), iris.n_classes())?;
    println!("topology {:?}, {} weights", topology.layer_sizes(), topology.weight_count());

    let cfg = TrainConfig {
        epochs: 300,
        seed: 3,
        ..TrainConfig::default()
    };
    let (model, trace) = train_foxann(&train, &val, &topology, &cfg)?;
    for epoch in [0, 9, 49, 99, 199, 299] {
        println!(
            "epoch {:>3}: train {:.4}  val {:.4}",
            epoch + 1,
            trace.train_loss[epoch],
            trace.val_loss[epoch]
        );
    }

    let predicted = model.predict_all(&val.features)?;
    let cm = metrics::confusion(&val.labels, &predicted, iris.n_classes())?;
    let r = metrics::report(&cm, model.val_loss)?;
    println!("holdout accuracy {:.3}, macro F {:.3}", r.accuracy, r.f_score);
    for (name, row) in iris.class_names.iter().zip(cm.counts()) {
        println!("  {name:<11} {row:?}");
    }
    Ok(())
}

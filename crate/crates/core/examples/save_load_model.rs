//! Train backprop on Breast Cancer, save it with its scaler, reload it and
//! classify raw (unscaled) measurements.
//!
//!     cargo run --release --example save_load_model

use foxann::data::{Bundled, Scaler};
use foxann::mlp::Topology;
use foxann::trainers::{train_backprop, SavedModel, Samples, TrainConfig};

fn main() -> foxann::Result<()> {
    let ds = Bundled::BreastCancer.load();
    let scaler = Scaler::fit(&ds.features);
    let all = Samples::new(scaler.apply(&ds.features), ds.labels.clone(), ds.n_classes())?;
    let topology = Topology::for_classification(ds.n_features(), ds.n_classes())?;
    let (model, _) = train_backprop(&all, &all, &topology, &TrainConfig::default())?;

    let path = std::env::temp_dir().join("foxann_breast_cancer.json");
    SavedModel::new(model, Some(scaler), ds.class_names.clone()).save(&path)?;
    println!("saved {}", path.display());

    let loaded = SavedModel::load(&path)?;
    let mut correct = 0;
    for i in 0..ds.n_samples() {
        correct += (loaded.predict_raw(ds.features.row(i))? == ds.labels[i]) as usize;
    }
    println!("reloaded model: {correct}/{} training rows correct", ds.n_samples());
    let first = loaded.predict_raw(ds.features.row(0))?;
    println!("row 0 -> {} (truth {})", loaded.class_names[first], ds.class_names[ds.labels[0]]);
    Ok(())
}

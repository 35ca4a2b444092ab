//! FOXANN against backprop and logistic regression on Wine, fold by fold,
//! plus the averaged validation-loss curves.
//!
//!     cargo run --release --example compare_baselines

use foxann::data::Bundled;
use foxann::harness::{self, DatasetSpec, ExperimentConfig};
use foxann::trainers::ModelKind;

fn main() -> foxann::Result<()> {
    let cfg = ExperimentConfig {
        datasets: vec![DatasetSpec::Bundled(Bundled::Wine)],
        folds: 5,
        seed: 11,
        ..ExperimentConfig::default()
    };
    let result = harness::run_experiment(&cfg)?;

    print!("fold");
    for m in ModelKind::ALL {
        print!("  {:>8}", m.display_name());
    }
    println!();
    for fold in 0..cfg.folds {
        print!("{fold:>4}");
        for m in ModelKind::ALL {
            print!("  {:>8.4}", result.get("wine", m).unwrap().folds[fold].report.accuracy);
        }
        println!();
    }

    println!("\nmean validation loss by epoch");
    for epoch in [1, 10, 25, 50, 100] {
        print!("{epoch:>4}");
        for m in ModelKind::ALL {
            print!("  {:>8.4}", result.get("wine", m).unwrap().mean_val_curve[epoch - 1]);
        }
        println!();
    }
    Ok(())
}

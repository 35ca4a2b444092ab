//! Cross-validate on a user CSV: numeric feature columns, class label last.
//! Without an argument a small two-moons style file is generated first.
//!
//!     cargo run --release --example custom_csv -- [path.csv]

use std::fmt::Write as _;

use foxann::harness::{self, DatasetSpec, ExperimentConfig, NormScope};
use rand::Rng;

fn synthetic() -> std::io::Result<std::path::PathBuf> {
    let mut rng = foxann::seed::rng(5);
    let mut text = String::from("x,y,label\n");
    for i in 0..200 {
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let (x, y, label) = if i % 2 == 0 {
            (t.cos(), t.sin(), "upper")
        } else {
            (1.0 - t.cos(), 0.5 - t.sin(), "lower")
        };
        let _ = writeln!(text, "{:.4},{:.4},{label}", x + rng.random_range(-0.1..0.1), y + rng.random_range(-0.1..0.1));
    }
    let path = std::env::temp_dir().join("moons.csv");
    std::fs::write(&path, text)?;
    Ok(path)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => synthetic()?,
    };
    let cfg = ExperimentConfig {
        datasets: vec![DatasetSpec::Csv(path)],
        folds: 5,
        normalization_scope: NormScope::PerFold,
        ..ExperimentConfig::default()
    };
    let result = harness::run_experiment(&cfg)?;
    print!("{}", harness::render_table(&result));
    Ok(())
}

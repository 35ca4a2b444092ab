//! Ten-fold cross-validation of all three models on every bundled dataset,
//! writing the same report directory as `foxann run`.
//!
//!     cargo run --release --example cross_validate -- [out_dir]

use foxann::data::Bundled;
use foxann::harness::{self, DatasetSpec, ExperimentConfig};

fn main() -> foxann::Result<()> {
    env_logger::init();
    let out = std::env::args().nth(1).unwrap_or_else(|| "results/cross_validate".into());
    let cfg = ExperimentConfig {
        datasets: Bundled::ALL.iter().map(|&b| DatasetSpec::Bundled(b)).collect(),
        seed: 2024,
        ..ExperimentConfig::default()
    };
    let result = harness::run_experiment(&cfg)?;
    print!("{}", harness::render_table(&result));

    let files = harness::export_report(&result, &out)?;
    println!("{} files in {out} ({:.1}s)", files.len(), result.wall_time_secs);
    Ok(())
}

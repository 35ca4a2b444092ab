//! Drive the command-line front end from code with a TOML config, then read
//! the exported metrics back.
//!
//!     cargo run --release --example config_file

use foxann::harness::RunResult;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("foxann_config_example");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("experiment.toml");
    std::fs::write(
        &config,
        r#"
datasets = ["iris", "wine"]
models = ["foxann", "logreg"]
folds = 5
epochs = 50
seed = 99
exploration = "gaussian_walk"
"#,
    )?;

    let out = dir.join("report");
    let code = foxann::cli::main([
        "foxann".as_ref(),
        "run".as_ref(),
        "--config".as_ref(),
        config.as_os_str(),
        "--out".as_ref(),
        out.as_os_str(),
    ]);
    if code != 0 {
        return Err(format!("foxann run exited with {code}").into());
    }

    let result = RunResult::load(out.join("metrics.json"))?;
    for row in &result.averages {
        println!("{:<7} mean accuracy over datasets {:.4}", row.model.display_name(), row.mean.accuracy);
    }
    Ok(())
}

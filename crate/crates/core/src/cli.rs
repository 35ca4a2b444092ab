//! Command-line front end. The `foxann` binary only forwards to [`main`].
//!
//! Configuration files are TOML with these optional keys; command-line flags
//! take precedence over the file, which takes precedence over the defaults.
//!
//! ```toml
//! datasets = ["iris", "wine", "data/my.csv"]
//! models = ["foxann", "ann", "logreg"]
//! folds = 10
//! repeats = 1
//! epochs = 100
//! population_size = 30
//! learning_rate = 0.5
//! weight_low = -3.0
//! weight_high = 3.0
//! seed = 7
//! normalization_scope = "whole_dataset"   # or "per_fold"
//! a_schedule = "decreasing"               # or "growing"
//! exploration = "gaussian_walk"           # or "multiplicative"
//! output_dir = "results"
//! ```

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::data::Bundled;
use crate::error::{Error, Result};
use crate::fox::{self, ASchedule, ExplorationRule, FoxParams, SearchBounds};
use crate::harness::{self, DatasetSpec, ExperimentConfig, NormScope, RunResult};
use crate::trainers::ModelKind;

/// Seed of the sphere run whose history is committed as a test fixture.
pub const SPHERE_REFERENCE_SEED: u64 = 20240917;

#[derive(Debug, Parser)]
#[command(name = "foxann", version, about = "Train and benchmark FOX-optimized neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross-validate models on datasets and write a report directory.
    Run(RunArgs),
    /// Print the aggregate table of a saved metrics.json.
    Compare {
        /// Path to metrics.json, or the directory containing it.
        metrics: PathBuf,
    },
    /// List the bundled datasets.
    ListDatasets,
    /// Minimize the sphere function with FOX and print the convergence history.
    SphereCheck(SphereArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Dataset name or CSV path; repeat or comma-separate for several.
    #[arg(long = "dataset", value_delimiter = ',')]
    datasets: Vec<String>,
    /// foxann, ann or logreg; repeat or comma-separate for several.
    #[arg(long = "model", value_delimiter = ',')]
    models: Vec<String>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// FOX population size.
    #[arg(long)]
    pop: Option<usize>,
    /// Learning rate for backprop and logistic regression.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Weight bounds as LO:HI.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    /// whole_dataset or per_fold.
    #[arg(long)]
    norm_scope: Option<String>,
    /// decreasing or growing.
    #[arg(long)]
    a_schedule: Option<String>,
    /// gaussian_walk or multiplicative.
    #[arg(long)]
    exploration: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SphereArgs {
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 30)]
    pop: usize,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = SPHERE_REFERENCE_SEED)]
    seed: u64,
    /// Search box as LO:HI.
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    bounds: String,
    #[arg(long)]
    exploration: Option<String>,
}

/// Keys accepted in a configuration file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub datasets: Option<Vec<DatasetSpec>>,
    pub models: Option<Vec<ModelKind>>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub epochs: Option<usize>,
    pub population_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub weight_low: Option<f64>,
    pub weight_high: Option<f64>,
    pub seed: Option<u64>,
    pub normalization_scope: Option<NormScope>,
    pub a_schedule: Option<ASchedule>,
    pub exploration: Option<ExplorationRule>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format {
            context: source.into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Overlays the keys present in the file onto `cfg`.
    pub fn apply(self, cfg: &mut ExperimentConfig) -> Option<PathBuf> {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        set!(
            datasets,
            models,
            folds,
            repeats,
            epochs,
            population_size,
            learning_rate,
            weight_low,
            weight_high,
            seed,
            normalization_scope,
            a_schedule,
            exploration
        );
        self.output_dir
    }
}

pub fn parse_bounds(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidParameter(format!("bounds must look like LO:HI, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("bounds need LO < HI, got `{s}`")));
    }
    Ok((lo, hi))
}

fn build_config(args: RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::default();
    let mut out = None;
    if let Some(path) = &args.config {
        out = ConfigFile::load(path)?.apply(&mut cfg);
    }
    if !args.datasets.is_empty() {
        cfg.datasets = args
            .datasets
            .iter()
            .map(|d| d.parse())
            .collect::<Result<_>>()?;
    }
    if !args.models.is_empty() {
        cfg.models = args.models.iter().map(|m| m.parse()).collect::<Result<_>>()?;
    }
    if let Some(v) = args.folds {
        cfg.folds = v;
    }
    if let Some(v) = args.repeats {
        cfg.repeats = v;
    }
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = args.pop {
        cfg.population_size = v;
    }
    if let Some(v) = args.lr {
        cfg.learning_rate = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(b) = &args.bounds {
        (cfg.weight_low, cfg.weight_high) = parse_bounds(b)?;
    }
    if let Some(s) = &args.norm_scope {
        cfg.normalization_scope = s.parse()?;
    }
    if let Some(s) = &args.a_schedule {
        cfg.a_schedule = s.parse()?;
    }
    if let Some(s) = &args.exploration {
        cfg.exploration = s.parse()?;
    }
    let out = args.out.or(out).unwrap_or_else(|| PathBuf::from("results"));
    cfg.validate()?;
    Ok((cfg, out))
}

fn cmd_run(args: RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let (cfg, out) = build_config(args)?;
    let result = harness::run_experiment(&cfg)?;
    let files = harness::export_report(&result, &out)?;
    let _ = write!(stdout, "{}", harness::render_table(&result));
    let _ = writeln!(
        stdout,
        "\nwrote {} files to {} in {:.1}s",
        files.len(),
        out.display(),
        result.wall_time_secs
    );
    Ok(())
}

fn cmd_compare(path: &Path, stdout: &mut dyn Write) -> Result<()> {
    let path = if path.is_dir() {
        path.join("metrics.json")
    } else {
        path.to_path_buf()
    };
    let result = RunResult::load(&path)?;
    let _ = write!(stdout, "{}", harness::render_table(&result));
    Ok(())
}

fn cmd_sphere(args: SphereArgs, stdout: &mut dyn Write) -> Result<()> {
    let (lo, hi) = parse_bounds(&args.bounds)?;
    let bounds = SearchBounds::uniform(args.dim, lo, hi)?;
    let mut params = FoxParams {
        population_size: args.pop,
        max_iterations: args.iters,
        ..FoxParams::default()
    };
    if let Some(e) = &args.exploration {
        params.exploration = e.parse()?;
    }
    let res = fox::optimize(sphere, &bounds, &params, args.seed)?;
    let _ = writeln!(stdout, "iteration,best_fitness");
    for (i, f) in res.fitness_history.iter().enumerate() {
        let _ = writeln!(stdout, "{},{:e}", i + 1, f);
    }
    let _ = writeln!(stdout, "# best_fitness = {:e}", res.best_fitness);
    let _ = writeln!(stdout, "# best_position = {:?}", res.best_position);
    Ok(())
}

/// `sum(x_i^2)`.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Runs the CLI with explicit streams and returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args, stdout),
        Command::Compare { metrics } => cmd_compare(&metrics, stdout),
        Command::ListDatasets => {
            for b in Bundled::ALL {
                let _ = writeln!(stdout, "{:<14} {:<28} {}", b.name(), b.file_name(), b.description());
            }
            Ok(())
        }
        Command::SphereCheck(args) => cmd_sphere(args, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let _ = writeln!(stderr, "  caused by: {s}");
                source = s.source();
            }
            1
        }
    }
}

pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_parsing() {
        assert_eq!(parse_bounds("-3:3").unwrap(), (-3.0, 3.0));
        assert_eq!(parse_bounds(" -1.5 : 2 ").unwrap(), (-1.5, 2.0));
        assert!(parse_bounds("3:-3").is_err());
        assert!(parse_bounds("3").is_err());
    }

    #[test]
    fn config_file_overlay() {
        let file = ConfigFile::parse(
            "datasets = [\"wine\"]\nmodels = [\"ann\"]\nepochs = 5\nnormalization_scope = \"per_fold\"\noutput_dir = \"o\"\n",
            "test",
        )
        .unwrap();
        let mut cfg = ExperimentConfig::default();
        let out = file.apply(&mut cfg);
        assert_eq!(out, Some(PathBuf::from("o")));
        assert_eq!(cfg.datasets, vec![DatasetSpec::Bundled(Bundled::Wine)]);
        assert_eq!(cfg.models, vec![ModelKind::Ann]);
        assert_eq!(cfg.epochs, 5);
        assert_eq!(cfg.normalization_scope, NormScope::PerFold);
        assert_eq!(cfg.folds, 10);
        assert!(ConfigFile::parse("epochz = 5", "test").is_err());
    }

    #[test]
    fn unknown_names_fail() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(["foxann", "run", "--dataset", "unknown"], &mut out, &mut err);
        assert_ne!(code, 0);
        let msg = String::from_utf8(err).unwrap();
        assert!(msg.contains("iris") && msg.contains("wine"), "{msg}");

        let mut err = Vec::new();
        let code = run_with(["foxann", "run", "--model", "svm"], &mut out, &mut err);
        assert_ne!(code, 0);
        let code = run_with(["foxann", "run", "--bogus"], &mut out, &mut err);
        assert_ne!(code, 0);
    }
}

//! Cross-validated experiments over datasets and models, and their reports.
//!
//! [`run_experiment`] trains every (dataset, model, fold) combination,
//! possibly in parallel, and assembles a [`RunResult`]. Results do not depend
//! on the number of worker threads: every job derives its own seed from the
//! run seed, and jobs are collected in a fixed order.
//!
//! [`export_report`] writes
//!
//! ```text
//! <dir>/metrics.csv                    one row per fold, plus mean and average rows
//! <dir>/metrics.json                   the full RunResult, including the config echo
//! <dir>/curves/<dataset>_<model>.csv   epoch,mean_val_loss
//! <dir>/models/<dataset>_<model>_fold<k>.json
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, Bundled, Dataset, Scaler};
use crate::error::{Error, Result};
use crate::fox::{ASchedule, ExplorationRule};
use crate::metrics::{self, MetricsReport};
use crate::mlp::Topology;
use crate::seed;
use crate::trainers::{
    self, EpochTrace, LossMode, ModelKind, SavedModel, Samples, TrainConfig,
};

/// A bundled dataset or a CSV file on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DatasetSpec {
    Bundled(Bundled),
    Csv(PathBuf),
}

impl DatasetSpec {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSpec::Bundled(b) => Ok(b.load()),
            DatasetSpec::Csv(path) => data::load_csv(path),
        }
    }

    /// Short name used in reports and file names.
    pub fn name(&self) -> String {
        match self {
            DatasetSpec::Bundled(b) => b.name().to_string(),
            DatasetSpec::Csv(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
        }
    }
}

impl std::str::FromStr for DatasetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(b) = Bundled::from_name(s) {
            return Ok(DatasetSpec::Bundled(b));
        }
        if s.ends_with(".csv") || Path::new(s).is_file() {
            return Ok(DatasetSpec::Csv(PathBuf::from(s)));
        }
        Err(Error::UnknownDataset {
            name: s.into(),
            valid: Bundled::ALL
                .iter()
                .map(|b| b.name())
                .chain(["<path>.csv"])
                .collect::<Vec<_>>()
                .join(", "),
        })
    }
}

impl TryFrom<String> for DatasetSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DatasetSpec> for String {
    fn from(d: DatasetSpec) -> String {
        match d {
            DatasetSpec::Bundled(b) => b.name().into(),
            DatasetSpec::Csv(p) => p.display().to_string(),
        }
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from(self.clone()))
    }
}

/// Which rows the min-max scaler is fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormScope {
    /// Fit once on the whole dataset before splitting.
    #[default]
    WholeDataset,
    /// Fit on each fold's training rows only.
    PerFold,
}

impl std::str::FromStr for NormScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole_dataset" | "whole" => Ok(NormScope::WholeDataset),
            "per_fold" | "fold" => Ok(NormScope::PerFold),
            other => Err(Error::InvalidParameter(format!(
                "unknown normalization scope `{other}` (valid: whole_dataset, per_fold)"
            ))),
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    pub models: Vec<ModelKind>,
    pub folds: usize,
    /// Independent re-shuffles of the folds; 1 reproduces a single
    /// cross-validation run.
    pub repeats: usize,
    pub epochs: usize,
    pub population_size: usize,
    pub learning_rate: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub seed: u64,
    pub normalization_scope: NormScope,
    pub a_schedule: ASchedule,
    pub exploration: ExplorationRule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            datasets: Bundled::ALL.iter().map(|&b| DatasetSpec::Bundled(b)).collect(),
            models: ModelKind::ALL.to_vec(),
            folds: 10,
            repeats: 1,
            epochs: train.epochs,
            population_size: train.population_size,
            learning_rate: train.learning_rate,
            weight_low: train.weight_low,
            weight_high: train.weight_high,
            seed: 0,
            normalization_scope: NormScope::WholeDataset,
            a_schedule: train.a_schedule,
            exploration: train.exploration,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::InvalidParameter("no dataset selected".into()));
        }
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("no model selected".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be at least 1".into()));
        }
        self.train_config(0).validate()
    }

    /// Trainer settings for one job, with its derived seed.
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            weight_low: self.weight_low,
            weight_high: self.weight_high,
            population_size: self.population_size,
            learning_rate: self.learning_rate,
            seed,
            loss_mode: LossMode::Mean,
            a_schedule: self.a_schedule,
            exploration: self.exploration,
        }
    }

    /// Seed for the fold assignment of one dataset; shared by all models so
    /// they are compared on identical folds.
    pub fn fold_seed(&self, dataset: &str, repeat: usize) -> u64 {
        seed::derive(self.seed, &[seed::hash_str(dataset), repeat as u64])
    }

    /// Seed for training one (dataset, model, repeat, fold) job.
    pub fn job_seed(&self, dataset: &str, model: ModelKind, repeat: usize, fold: usize) -> u64 {
        seed::derive(
            self.seed,
            &[
                seed::hash_str(dataset),
                seed::hash_str(model.name()),
                repeat as u64,
                fold as u64,
            ],
        )
    }
}

/// Outcome of one trained fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_val: usize,
    pub train_loss: f64,
    pub report: MetricsReport,
    pub trace: EpochTrace,
}

/// All folds of one (dataset, model) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub dataset: String,
    pub model: ModelKind,
    pub topology: Vec<usize>,
    pub folds: Vec<FoldResult>,
    /// Field-wise mean over `folds`.
    pub mean: MetricsReport,
    /// Per-epoch validation loss averaged over `folds`.
    pub mean_val_curve: Vec<f64>,
}

/// One model's metrics averaged over the datasets of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageRow {
    pub model: ModelKind,
    pub mean: MetricsReport,
    /// Per-epoch mean of the datasets' `mean_val_curve`s.
    pub mean_val_curve: Vec<f64>,
}

/// A trained fold model, kept for export.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldModel {
    pub dataset: String,
    pub model: ModelKind,
    pub repeat: usize,
    pub fold: usize,
    pub saved: SavedModel,
}

/// The outcome of [`run_experiment`].
///
/// The trained weights in `models` are exported as separate files. Neither
/// they nor the wall time are written to `metrics.json`, so identical
/// configurations produce identical files; equality ignores both.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub format: String,
    pub config: ExperimentConfig,
    pub results: Vec<ModelResult>,
    pub averages: Vec<AverageRow>,
    #[serde(skip)]
    pub wall_time_secs: f64,
    #[serde(skip)]
    pub models: Vec<FoldModel>,
}

pub const RESULT_FORMAT: &str = "foxann-results/1";

impl PartialEq for RunResult {
    fn eq(&self, other: &Self) -> bool {
        self.format == other.format
            && self.config == other.config
            && self.results == other.results
            && self.averages == other.averages
    }
}

impl RunResult {
    pub fn get(&self, dataset: &str, model: ModelKind) -> Option<&ModelResult> {
        self.results
            .iter()
            .find(|r| r.dataset == dataset && r.model == model)
    }

    pub fn average(&self, model: ModelKind) -> Option<&AverageRow> {
        self.averages.iter().find(|r| r.model == model)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format {
            context: "metrics.json".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format {
            context: "metrics.json".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

struct PreparedDataset {
    name: String,
    dataset: Dataset,
    topology: Topology,
    whole_scaler: Scaler,
    folds: Vec<(usize, data::FoldSplit)>,
}

struct Job<'a> {
    data: &'a PreparedDataset,
    model: ModelKind,
    repeat: usize,
    split: &'a data::FoldSplit,
}

struct JobOutput {
    fold: FoldResult,
    saved: SavedModel,
}

fn samples(ds: &Dataset, scaler: &Scaler, indices: &[usize]) -> Result<Samples> {
    let features = scaler.apply(&ds.features.select_rows(indices));
    let labels = indices.iter().map(|&i| ds.labels[i]).collect();
    Samples::new(features, labels, ds.n_classes())
}

fn run_job(cfg: &ExperimentConfig, job: &Job<'_>) -> Result<JobOutput> {
    let ds = &job.data.dataset;
    let split = job.split;
    let scaler = match cfg.normalization_scope {
        NormScope::WholeDataset => job.data.whole_scaler.clone(),
        NormScope::PerFold => Scaler::fit(&ds.features.select_rows(&split.train_indices)),
    };
    let train = samples(ds, &scaler, &split.train_indices)?;
    let val = samples(ds, &scaler, &split.val_indices)?;
    let job_seed = cfg.job_seed(&job.data.name, job.model, job.repeat, split.fold_index);
    let tc = cfg.train_config(job_seed);
    let (model, trace) = match job.model {
        ModelKind::Foxann => trainers::train_foxann(&train, &val, &job.data.topology, &tc)?,
        ModelKind::Ann => trainers::train_backprop(&train, &val, &job.data.topology, &tc)?,
        ModelKind::Logreg => trainers::train_logreg(&train, &val, ds.n_classes(), &tc)?,
    };
    let predicted = model.predict_all(&val.features)?;
    let cm = metrics::confusion(&val.labels, &predicted, ds.n_classes())?;
    let report = metrics::report(&cm, model.val_loss)?;
    Ok(JobOutput {
        fold: FoldResult {
            repeat: job.repeat,
            fold: split.fold_index,
            seed: job_seed,
            n_train: train.len(),
            n_val: val.len(),
            train_loss: model.train_loss,
            report,
            trace,
        },
        saved: SavedModel::new(model, Some(scaler), ds.class_names.clone()),
    })
}

fn mean_curve<'a>(curves: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for c in curves {
        if sum.is_empty() {
            sum = vec![0.0; c.len()];
        }
        for (s, v) in sum.iter_mut().zip(c) {
            *s += v;
        }
        n += 1;
    }
    sum.iter().map(|s| s / n.max(1) as f64).collect()
}

/// Runs every (dataset, model, repeat, fold) job of `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let started = Instant::now();

    let mut prepared = Vec::with_capacity(cfg.datasets.len());
    for spec in &cfg.datasets {
        let dataset = spec.load()?;
        let name = spec.name();
        let topology = Topology::for_classification(dataset.n_features(), dataset.n_classes())?;
        let mut folds = Vec::new();
        for repeat in 0..cfg.repeats {
            let splits = data::stratified_k_fold(&dataset, cfg.folds, cfg.fold_seed(&name, repeat))?;
            folds.extend(splits.into_iter().map(|s| (repeat, s)));
        }
        prepared.push(PreparedDataset {
            whole_scaler: Scaler::fit(&dataset.features),
            name,
            dataset,
            topology,
            folds,
        });
    }

    let jobs: Vec<Job<'_>> = prepared
        .iter()
        .flat_map(|p| {
            cfg.models.iter().flat_map(move |&model| {
                p.folds.iter().map(move |(repeat, split)| Job {
                    data: p,
                    model,
                    repeat: *repeat,
                    split,
                })
            })
        })
        .collect();

    let outputs: Vec<JobOutput> = jobs
        .par_iter()
        .map(|job| {
            run_job(cfg, job).map_err(|e| Error::Fold {
                dataset: job.data.name.clone(),
                model: job.model.name().into(),
                fold: job.split.fold_index,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    let mut models = Vec::new();
    let mut outputs = outputs.into_iter();
    for p in &prepared {
        for &model in &cfg.models {
            let mut folds = Vec::with_capacity(p.folds.len());
            for _ in 0..p.folds.len() {
                let out = outputs.next().expect("one output per job");
                models.push(FoldModel {
                    dataset: p.name.clone(),
                    model,
                    repeat: out.fold.repeat,
                    fold: out.fold.fold,
                    saved: out.saved,
                });
                folds.push(out.fold);
            }
            let reports: Vec<MetricsReport> = folds.iter().map(|f| f.report).collect();
            results.push(ModelResult {
                dataset: p.name.clone(),
                model,
                topology: p.topology.layer_sizes().to_vec(),
                mean: MetricsReport::mean(&reports).expect("at least two folds"),
                mean_val_curve: mean_curve(folds.iter().map(|f| f.trace.val_loss.as_slice())),
                folds,
            });
        }
    }

    let averages = cfg
        .models
        .iter()
        .map(|&model| {
            let rows: Vec<&ModelResult> = results.iter().filter(|r| r.model == model).collect();
            let means: Vec<MetricsReport> = rows.iter().map(|r| r.mean).collect();
            AverageRow {
                model,
                mean: MetricsReport::mean(&means).expect("at least one dataset"),
                mean_val_curve: mean_curve(rows.iter().map(|r| r.mean_val_curve.as_slice())),
            }
        })
        .collect();

    Ok(RunResult {
        format: RESULT_FORMAT.into(),
        config: cfg.clone(),
        results,
        averages,
        wall_time_secs: started.elapsed().as_secs_f64(),
        models,
    })
}

pub const METRICS_CSV_HEADER: &str =
    "dataset,model,fold,accuracy,loss,precision,recall,f_score,repeat,seed,n_train,n_val";

fn csv_row(
    out: &mut String,
    dataset: &str,
    model: ModelKind,
    fold: &str,
    r: &MetricsReport,
    provenance: &str,
) {
    out.push_str(&format!(
        "{dataset},{},{fold},{},{},{},{},{},{provenance}\n",
        model.name(),
        r.accuracy,
        r.loss,
        r.precision,
        r.recall,
        r.f_score
    ));
}

/// `metrics.csv` contents: one row per fold, a `mean` row per (dataset,
/// model), and an `average` dataset row per model.
pub fn metrics_csv(result: &RunResult) -> String {
    let mut out = format!("{METRICS_CSV_HEADER}\n");
    for r in &result.results {
        for f in &r.folds {
            let prov = format!("{},{},{},{}", f.repeat, f.seed, f.n_train, f.n_val);
            csv_row(&mut out, &r.dataset, r.model, &f.fold.to_string(), &f.report, &prov);
        }
        csv_row(&mut out, &r.dataset, r.model, "mean", &r.mean, ",,,");
    }
    for a in &result.averages {
        csv_row(&mut out, "average", a.model, "mean", &a.mean, ",,,");
    }
    out
}

fn file_stem(dataset: &str, model: ModelKind) -> String {
    let clean: String = dataset
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("{clean}_{}", model.name())
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the report files under `dir` and returns their paths.
pub fn export_report(result: &RunResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let curves = dir.join("curves");
    let models = dir.join("models");
    for d in [dir, &curves, &models] {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let mut written = Vec::new();

    let path = dir.join("metrics.csv");
    write(&path, &metrics_csv(result))?;
    written.push(path);

    let path = dir.join("metrics.json");
    write(&path, &result.to_json()?)?;
    written.push(path);

    for r in &result.results {
        let mut csv = String::from("epoch,mean_val_loss\n");
        for (i, v) in r.mean_val_curve.iter().enumerate() {
            csv.push_str(&format!("{},{}\n", i + 1, v));
        }
        let path = curves.join(format!("{}.csv", file_stem(&r.dataset, r.model)));
        write(&path, &csv)?;
        written.push(path);
    }

    let repeated = result.config.repeats > 1;
    for m in &result.models {
        let name = if repeated {
            format!("{}_r{}_fold{}.json", file_stem(&m.dataset, m.model), m.repeat, m.fold)
        } else {
            format!("{}_fold{}.json", file_stem(&m.dataset, m.model), m.fold)
        };
        let path = models.join(name);
        write(&path, &m.saved.to_json()?)?;
        written.push(path);
    }
    Ok(written)
}

/// Fixed-width table of the fold-averaged rows followed by the per-model
/// averages over datasets.
pub fn render_table(result: &RunResult) -> String {
    let mut out = format!(
        "{:<16} {:<7} {:>9} {:>8} {:>9} {:>8} {:>8}\n",
        "Dataset", "Model", "Accuracy", "Loss", "Precision", "Recall", "F-Score"
    );
    let mut line = |dataset: &str, model: ModelKind, r: &MetricsReport| {
        out.push_str(&format!(
            "{:<16} {:<7} {:>9.4} {:>8.4} {:>9.4} {:>8.4} {:>8.4}\n",
            dataset,
            model.display_name(),
            r.accuracy,
            r.loss,
            r.precision,
            r.recall,
            r.f_score
        ));
    };
    for r in &result.results {
        line(&r.dataset, r.model, &r.mean);
    }
    for a in &result.averages {
        line("Average", a.model, &a.mean);
    }
    out
}

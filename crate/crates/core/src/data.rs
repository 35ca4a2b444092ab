//! Datasets, min-max scaling, one-hot targets and stratified folds.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                what: "matrix values",
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    what: "matrix row",
                    expected: cols,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            values,
        }
    }
}

/// A labelled classification dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    /// Class index of each row, in `0..class_names.len()`.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// The datasets shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bundled {
    Iris,
    BreastCancer,
    Wine,
}

impl Bundled {
    pub const ALL: [Bundled; 3] = [Bundled::Iris, Bundled::BreastCancer, Bundled::Wine];

    pub fn name(self) -> &'static str {
        match self {
            Bundled::Iris => "iris",
            Bundled::BreastCancer => "breast_cancer",
            Bundled::Wine => "wine",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            Bundled::Iris => "iris.csv",
            Bundled::BreastCancer => "breast_cancer_wisconsin.csv",
            Bundled::Wine => "wine.csv",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Bundled::Iris => "Iris flower, 150 samples, 4 features, 3 classes",
            Bundled::BreastCancer => "Breast Cancer Wisconsin (diagnostic), 569 samples, 30 features, 2 classes",
            Bundled::Wine => "Wine recognition, 178 samples, 13 features, 3 classes",
        }
    }

    fn contents(self) -> &'static str {
        match self {
            Bundled::Iris => include_str!("../data/iris.csv"),
            Bundled::BreastCancer => include_str!("../data/breast_cancer_wisconsin.csv"),
            Bundled::Wine => include_str!("../data/wine.csv"),
        }
    }

    pub fn load(self) -> Dataset {
        parse_csv(self.contents().as_bytes(), self.name())
            .expect("bundled dataset is well-formed")
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "iris" => Some(Bundled::Iris),
            "breast_cancer" | "breast-cancer" | "breast_cancer_wisconsin" => {
                Some(Bundled::BreastCancer)
            }
            "wine" => Some(Bundled::Wine),
            _ => None,
        }
    }
}

/// Reads a CSV file: header row, numeric feature columns, label last.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut ds = parse_csv(file, &path.display().to_string())?;
    ds.name = name;
    Ok(ds)
}

/// Parses CSV from any reader. `source` names the input in error messages
/// and becomes the dataset name. Class indices follow the order in which
/// labels first appear.
pub fn parse_csv<R: Read>(reader: R, source: &str) -> Result<Dataset> {
    let csv_err = |row: usize, column: &str, message: String| Error::Csv {
        path: source.to_string(),
        row,
        column: column.to_string(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(1, "-", e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 2 {
        return Err(csv_err(
            1,
            "-",
            "need at least one feature column and a label column".into(),
        ));
    }
    let n_features = headers.len() - 1;

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        // header is row 1
        let row = i + 2;
        let record = record.map_err(|e| csv_err(row, "-", e.to_string()))?;
        if record.len() != headers.len() {
            return Err(csv_err(
                row,
                "-",
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        for (j, field) in record.iter().take(n_features).enumerate() {
            if field.is_empty() {
                return Err(csv_err(row, &headers[j], "missing value".into()));
            }
            let v: f64 = field
                .parse()
                .map_err(|_| csv_err(row, &headers[j], format!("non-numeric value `{field}`")))?;
            if !v.is_finite() {
                return Err(csv_err(row, &headers[j], format!("non-finite value `{field}`")));
            }
            values.push(v);
        }
        let label = &record[n_features];
        if label.is_empty() {
            return Err(csv_err(row, &headers[n_features], "missing label".into()));
        }
        let idx = match class_names.iter().position(|c| c == label) {
            Some(idx) => idx,
            None => {
                class_names.push(label.to_string());
                class_names.len() - 1
            }
        };
        labels.push(idx);
    }
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses(class_names.len()));
    }
    Ok(Dataset {
        name: source.to_string(),
        features: Matrix::new(labels.len(), n_features, values)?,
        labels,
        class_names,
        feature_names: headers[..n_features].to_vec(),
    })
}

/// Per-feature minimum and maximum for min-max scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    pub fn fit(features: &Matrix) -> Self {
        let mut min = vec![f64::INFINITY; features.cols()];
        let mut max = vec![f64::NEG_INFINITY; features.cols()];
        for row in features.iter_rows() {
            for (j, &x) in row.iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Self { min, max }
    }

    /// `(x - min) / (max - min)`; constant features map to 0. No clamping,
    /// so rows outside the fitted range fall outside `[0, 1]`.
    pub fn transform_row(&self, row: &mut [f64]) {
        for ((x, &lo), &hi) in row.iter_mut().zip(&self.min).zip(&self.max) {
            let span = hi - lo;
            *x = if span > 0.0 { (*x - lo) / span } else { 0.0 };
        }
    }

    pub fn apply(&self, features: &Matrix) -> Matrix {
        let mut out = features.clone();
        for i in 0..out.rows() {
            self.transform_row(out.row_mut(i));
        }
        out
    }
}

pub fn fit_scaler(features: &Matrix) -> Scaler {
    Scaler::fit(features)
}

pub fn apply_scaler(scaler: &Scaler, features: &Matrix) -> Matrix {
    scaler.apply(features)
}

pub fn one_hot(label: usize, n_classes: usize) -> Result<Vec<f64>> {
    if label >= n_classes {
        return Err(Error::LabelOutOfRange { label, n_classes });
    }
    let mut v = vec![0.0; n_classes];
    v[label] = 1.0;
    Ok(v)
}

/// One-hot matrix (`labels.len() x n_classes`).
pub fn one_hot_matrix(labels: &[usize], n_classes: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(labels.len(), n_classes);
    for (i, &l) in labels.iter().enumerate() {
        m.row_mut(i).copy_from_slice(&one_hot(l, n_classes)?);
    }
    Ok(m)
}

/// Training and validation indices of one fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_index: usize,
    pub train_indices: Vec<usize>,
    pub val_indices: Vec<usize>,
}

/// Stratified k-fold assignment.
///
/// Each class's indices are shuffled, the classes are concatenated and the
/// resulting sequence is dealt to folds round-robin. Per-class fold sizes
/// then differ by at most one, as do the total fold sizes. If some class has
/// fewer than `k` members the dataset is shuffled as a whole instead.
pub fn stratified_k_fold(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    stratified_k_fold_labels(&dataset.labels, dataset.n_classes(), k, seed)
}

pub fn stratified_k_fold_labels(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<FoldSplit>> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the number of samples ({n})"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        if l >= n_classes {
            return Err(Error::LabelOutOfRange { label: l, n_classes });
        }
        by_class[l].push(i);
    }

    let mut rng = seed::rng(seed);
    let order: Vec<usize> = if by_class.iter().all(|c| c.len() >= k) {
        by_class
            .into_iter()
            .flat_map(|mut members| {
                members.shuffle(&mut rng);
                members
            })
            .collect()
    } else {
        log::warn!("a class has fewer than {k} samples; falling back to unstratified folds");
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        all
    };

    let mut fold_of = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % k;
    }
    Ok((0..k)
        .map(|f| {
            let (val, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == f);
            FoldSplit {
                fold_index: f,
                train_indices: train,
                val_indices: val,
            }
        })
        .collect())
}

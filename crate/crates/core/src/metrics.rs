//! Confusion matrices and macro-averaged classification metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `counts[t][p]` is the number of samples of true class `t` predicted as `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.n_classes()).map(|c| self.counts[c][c]).sum()
    }

    /// TP / (TP + FP), or 0 when the class is never predicted.
    pub fn precision(&self, class: usize) -> f64 {
        let predicted: u64 = self.counts.iter().map(|row| row[class]).sum();
        ratio(self.counts[class][class], predicted)
    }

    /// TP / (TP + FN), or 0 when the class never occurs.
    pub fn recall(&self, class: usize) -> f64 {
        let actual: u64 = self.counts[class].iter().sum();
        ratio(self.counts[class][class], actual)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            what: "predictions",
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    let mut counts = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for label in [t, p] {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { label, n_classes });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// One row of a results table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub loss: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

impl MetricsReport {
    /// Field-wise arithmetic mean. Returns `None` for an empty slice.
    pub fn mean(reports: &[MetricsReport]) -> Option<MetricsReport> {
        if reports.is_empty() {
            return None;
        }
        let n = reports.len() as f64;
        let avg = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Some(MetricsReport {
            accuracy: avg(|r| r.accuracy),
            loss: avg(|r| r.loss),
            precision: avg(|r| r.precision),
            recall: avg(|r| r.recall),
            f_score: avg(|r| r.f_score),
        })
    }
}

/// Accuracy plus macro precision and recall; the F-score is the harmonic
/// mean of the two macro values.
pub fn report(cm: &ConfusionMatrix, val_loss: f64) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::InvalidParameter(
            "cannot report metrics for an empty confusion matrix".into(),
        ));
    }
    let c = cm.n_classes() as f64;
    let precision = (0..cm.n_classes()).map(|k| cm.precision(k)).sum::<f64>() / c;
    let recall = (0..cm.n_classes()).map(|k| cm.recall(k)).sum::<f64>() / c;
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MetricsReport {
        accuracy: cm.correct() as f64 / total as f64,
        loss: val_loss,
        precision,
        recall,
        f_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_hand_counts() {
        let cm = confusion(&[0, 1, 2], &[0, 1, 2], 3).unwrap();
        for t in 0..3 {
            for p in 0..3 {
                assert_eq!(cm.get(t, p), u64::from(t == p));
            }
        }
        let cm = confusion(&[0, 0, 1], &[0, 1, 1], 2).unwrap();
        assert_eq!(cm.counts(), &[vec![1, 1], vec![0, 1]]);
        let empty = confusion(&[], &[], 3).unwrap();
        assert_eq!(empty.total(), 0);
        assert!(report(&empty, 0.0).is_err());
    }

    #[test]
    fn range_and_length_errors() {
        assert!(matches!(
            confusion(&[0, 3], &[0, 1], 3),
            Err(Error::LabelOutOfRange { label: 3, .. })
        ));
        assert!(confusion(&[0], &[0, 1], 3).is_err());
    }

    #[test]
    fn perfect_predictions() {
        let y = [0, 1, 2, 2, 1];
        let r = report(&confusion(&y, &y, 3).unwrap(), 0.01).unwrap();
        assert_eq!((r.accuracy, r.precision, r.recall, r.f_score), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.loss, 0.01);
    }

    #[test]
    fn binary_hand_example() {
        // class 0 positive: TP=3, FN=1, FP=1, TN=5
        let y_true = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let y_pred = [0, 0, 0, 1, 0, 1, 1, 1, 1, 1];
        let cm = confusion(&y_true, &y_pred, 2).unwrap();
        assert_eq!(cm.precision(0), 0.75);
        assert_eq!(cm.recall(0), 0.75);
        assert!((cm.precision(1) - 5.0 / 6.0).abs() < 1e-15);
        assert!((cm.recall(1) - 5.0 / 6.0).abs() < 1e-15);
        let r = report(&cm, 0.0).unwrap();
        let macro_p = (0.75 + 5.0 / 6.0) / 2.0;
        assert!((r.accuracy - 0.8).abs() < 1e-15);
        assert!((r.precision - macro_p).abs() < 1e-15);
        assert!((r.recall - macro_p).abs() < 1e-15);
        assert!((r.f_score - macro_p).abs() < 1e-15);
    }

    #[test]
    fn never_predicted_class_contributes_zero_precision() {
        let cm = confusion(&[0, 1, 2], &[0, 1, 1], 3).unwrap();
        assert_eq!(cm.precision(2), 0.0);
        let r = report(&cm, 0.0).unwrap();
        assert!((r.precision - (1.0 + 0.5 + 0.0) / 3.0).abs() < 1e-15);
        assert!((r.recall - (1.0 + 1.0 + 0.0) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mean_of_reports() {
        let a = MetricsReport {
            accuracy: 1.0,
            loss: 0.0,
            precision: 1.0,
            recall: 0.5,
            f_score: 0.2,
        };
        let b = MetricsReport {
            accuracy: 0.5,
            loss: 0.5,
            precision: 0.0,
            recall: 0.5,
            f_score: 0.4,
        };
        let m = MetricsReport::mean(&[a, b]).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.loss, 0.25);
        assert!((m.f_score - 0.3).abs() < 1e-15);
        assert!(MetricsReport::mean(&[]).is_none());
    }
}

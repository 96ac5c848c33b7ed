use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One operating point of a one-vs-rest ROC curve. The first point of a
/// curve has threshold `+inf` and rates (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRoc {
    pub class: usize,
    /// Empty when the class has no positive or no negative test sample.
    #[serde(skip)]
    pub points: Vec<RocPoint>,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classifier: String,
    pub feature_count: usize,
    pub reduction_percent: f64,
    pub n_test: usize,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<PerClass>,
    pub roc: Vec<ClassRoc>,
    pub notes: Vec<String>,
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<Vec<Vec<usize>>> {
    if y_true.len() != y_pred.len() {
        return Err(Error::ShapeMismatch(format!("{} labels vs {} predictions", y_true.len(), y_pred.len())));
    }
    let mut m = vec![vec![0; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::ConfigInvalid(format!("label {} outside 0..{n_classes}", t.max(p))));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Per-class precision, recall and F1 with 0 for empty denominators.
pub fn per_class_metrics(confusion: &[Vec<usize>]) -> Vec<PerClass> {
    let c = confusion.len();
    (0..c)
        .map(|k| {
            let tp = confusion[k][k] as f64;
            let support: usize = confusion[k].iter().sum();
            let predicted: usize = confusion.iter().map(|r| r[k]).sum();
            let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
            let recall = if support > 0 { tp / support as f64 } else { 0.0 };
            let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
            PerClass { precision, recall, f1, support }
        })
        .collect()
}

/// Macro averages over classes that occur in the truth or the predictions.
pub fn macro_averages(confusion: &[Vec<usize>], per_class: &[PerClass]) -> (f64, f64, f64) {
    let present: Vec<usize> = (0..confusion.len())
        .filter(|&k| per_class[k].support > 0 || confusion.iter().any(|r| r[k] > 0))
        .collect();
    if present.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mean = |f: &dyn Fn(&PerClass) -> f64| present.iter().map(|&k| f(&per_class[k])).sum::<f64>() / present.len() as f64;
    (mean(&|p| p.precision), mean(&|p| p.recall), mean(&|p| p.f1))
}

/// ROC points for `scores` against the indicator `positive`, visited in
/// decreasing threshold order so both rates are non-decreasing.
pub fn roc_curve(scores: &[f64], positive: &[bool]) -> Vec<RocPoint> {
    let p = positive.iter().filter(|&&b| b).count();
    let n = positive.len() - p;
    if p == 0 || n == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut out = vec![RocPoint { threshold: f64::INFINITY, tpr: 0.0, fpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    for (pos, &i) in order.iter().enumerate() {
        if positive[i] {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_run = order.get(pos + 1).map_or(true, |&j| scores[j] != scores[i]);
        if last_of_run {
            out.push(RocPoint { threshold: scores[i], tpr: tp as f64 / p as f64, fpr: fp as f64 / n as f64 });
        }
    }
    out
}

/// Trapezoidal area under a curve from [`roc_curve`].
pub fn auc(points: &[RocPoint]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    Some(points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0).sum())
}

/// Assembles a report from predictions and per-class decision values (`n × C`).
pub fn evaluate(
    classifier: &str,
    y_true: &[usize],
    y_pred: &[usize],
    scores: ArrayView2<f64>,
    n_classes: usize,
) -> Result<MetricsReport> {
    if scores.dim() != (y_true.len(), n_classes) {
        return Err(Error::ShapeMismatch(format!(
            "decision values are {:?}, expected ({}, {n_classes})",
            scores.dim(),
            y_true.len()
        )));
    }
    let confusion = confusion_matrix(y_true, y_pred, n_classes)?;
    let per_class = per_class_metrics(&confusion);
    let (macro_precision, macro_recall, macro_f1) = macro_averages(&confusion, &per_class);
    let trace: usize = (0..n_classes).map(|k| confusion[k][k]).sum();
    let n = y_true.len();
    let roc = (0..n_classes)
        .map(|k| {
            let positive: Vec<bool> = y_true.iter().map(|&t| t == k).collect();
            let points = roc_curve(&scores.column(k).to_vec(), &positive);
            ClassRoc { class: k, auc: auc(&points), points }
        })
        .collect();
    Ok(MetricsReport {
        classifier: classifier.to_string(),
        feature_count: 0,
        reduction_percent: 0.0,
        n_test: n,
        accuracy: if n > 0 { trace as f64 / n as f64 } else { 0.0 },
        macro_precision,
        macro_recall,
        macro_f1,
        confusion,
        per_class,
        roc,
        notes: Vec::new(),
    })
}

/// Row-wise argmax; exact ties go to the smaller class id.
pub fn argmax_rows(scores: &Array2<f64>) -> Vec<usize> {
    scores
        .outer_iter()
        .map(|row| {
            let mut best = 0;
            for (k, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect()
}

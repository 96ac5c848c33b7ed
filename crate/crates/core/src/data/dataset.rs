use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
    Unsplit,
}

/// Samples as rows, with optional integer labels in `0..label_names.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Option<Vec<usize>>,
    pub feature_names: Vec<String>,
    /// Class id → name.
    pub label_names: Vec<String>,
    pub split: Split,
}

impl Dataset {
    /// Validates finiteness, name counts and labels. Training and unsplit data
    /// must populate every class; a test split may miss some.
    pub fn new(
        x: Array2<f64>,
        y: Option<Vec<usize>>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
        split: Split,
    ) -> Result<Self> {
        let (n, d) = x.dim();
        if let Some(((i, j), v)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i}, feature {j} ({v})")));
        }
        if feature_names.len() != d {
            return Err(Error::ShapeMismatch(format!("{} feature names for {d} columns", feature_names.len())));
        }
        if let Some(y) = &y {
            if y.len() != n {
                return Err(Error::ShapeMismatch(format!("{} labels for {n} samples", y.len())));
            }
            let c = label_names.len();
            if let Some((i, l)) = y.iter().enumerate().find(|(_, &l)| l >= c) {
                return Err(Error::ConfigInvalid(format!("label {l} of sample {i} is outside 0..{c}")));
            }
            if split != Split::Test {
                let counts = class_counts(y, c);
                if let Some(empty) = counts.iter().position(|&k| k == 0) {
                    return Err(Error::DegenerateData(format!("class {empty} ('{}') has no samples", label_names[empty])));
                }
            }
        }
        Ok(Self { x, y, feature_names, label_names, split })
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn labels(&self) -> Result<&[usize]> {
        self.y.as_deref().ok_or_else(|| Error::ConfigInvalid("dataset has no labels".into()))
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.y.as_ref().map_or_else(Vec::new, |y| class_counts(y, self.n_classes()))
    }

    /// Keeps the given columns, in the given order.
    pub fn select_features(&self, columns: &[usize]) -> Result<Dataset> {
        if let Some(&j) = columns.iter().find(|&&j| j >= self.n_features()) {
            return Err(Error::ConfigInvalid(format!("feature index {j} out of range 0..{}", self.n_features())));
        }
        Ok(Dataset {
            x: self.x.select(Axis(1), columns),
            y: self.y.clone(),
            feature_names: columns.iter().map(|&j| self.feature_names[j].clone()).collect(),
            label_names: self.label_names.clone(),
            split: self.split,
        })
    }
}

pub fn class_counts(y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &l in y {
        counts[l] += 1;
    }
    counts
}

/// Per-column z-scoring parameters. Population standard deviation; columns
/// whose spread is at rounding level are flagged constant and map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<f64>) -> Self {
        let n = x.nrows().max(1) as f64;
        let means: Array1<f64> = x.sum_axis(Axis(0)) / n;
        let mut stds = Vec::with_capacity(x.ncols());
        let mut constant = Vec::with_capacity(x.ncols());
        for (col, &m) in x.axis_iter(Axis(1)).zip(means.iter()) {
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
            let s = var.sqrt();
            constant.push(!(s > 1e-12 * m.abs()));
            stds.push(s);
        }
        Self { means: means.to_vec(), stds, constant }
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.means.len() {
            return Err(Error::ShapeMismatch(format!("{} columns, standardizer fitted on {}", x.ncols(), self.means.len())));
        }
        let mut out = x.to_owned();
        for (j, mut col) in out.axis_iter_mut(Axis(1)).enumerate() {
            if self.constant[j] {
                col.fill(0.0);
            } else {
                let (m, s) = (self.means[j], self.stds[j]);
                col.mapv_inplace(|v| (v - m) / s);
            }
        }
        Ok(out)
    }

    pub fn constant_columns(&self) -> Vec<usize> {
        self.constant.iter().enumerate().filter(|(_, c)| **c).map(|(j, _)| j).collect()
    }
}

/// Z-scores a matrix with its own column statistics.
pub fn standardize_matrix(x: ArrayView2<f64>) -> (Array2<f64>, Standardizer) {
    let st = Standardizer::fit(x);
    let z = st.transform(x).expect("fitted on the same columns");
    (z, st)
}

/// Standardizes both splits with statistics from `train` only.
pub fn standardize(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset, Standardizer)> {
    let st = Standardizer::fit(train.x.view());
    let mut tr = train.clone();
    tr.x = st.transform(train.x.view())?;
    let mut te = test.clone();
    te.x = st.transform(test.x.view())?;
    Ok((tr, te, st))
}

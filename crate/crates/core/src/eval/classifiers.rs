use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{argmax_rows, evaluate, MetricsReport};
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Knn,
    Gnb,
    LinearSvm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] = [ClassifierKind::Knn, ClassifierKind::Gnb, ClassifierKind::LinearSvm];

    pub fn id(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::LinearSvm => "linear_svm",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "knn" => Ok(ClassifierKind::Knn),
            "gnb" | "gaussian_nb" => Ok(ClassifierKind::Gnb),
            "linear_svm" | "svm" => Ok(ClassifierKind::LinearSvm),
            _ => Err(Error::ConfigInvalid(format!("unknown classifier '{s}' (allowed: knn, gnb, linear_svm)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub knn_k: usize,
    pub svm_lambda: f64,
    pub svm_epochs: usize,
    pub seed: u64,
    /// Turns the unstandardized-input warning of the linear SVM into an error.
    pub strict: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self { knn_k: 5, svm_lambda: 1e-4, svm_epochs: 30, seed: 42, strict: false }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 {
            return Err(Error::ConfigInvalid("knn_k must be at least 1".into()));
        }
        if !(self.svm_lambda > 0.0 && self.svm_lambda.is_finite()) {
            return Err(Error::ConfigInvalid(format!("svm_lambda must be positive, got {}", self.svm_lambda)));
        }
        if self.svm_epochs == 0 {
            return Err(Error::ConfigInvalid("svm_epochs must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_train(x: ArrayView2<f64>, y: &[usize], n_classes: usize) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::EmptyTrain);
    }
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!("{} training rows, {} labels", x.nrows(), y.len())));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::ConfigInvalid(format!("label {bad} outside 0..{n_classes}")));
    }
    Ok(())
}

fn check_width(train: ArrayView2<f64>, test: ArrayView2<f64>) -> Result<()> {
    if train.ncols() != test.ncols() {
        return Err(Error::ShapeMismatch(format!("train has {} features, test has {}", train.ncols(), test.ncols())));
    }
    Ok(())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (u, v) in ca.zip(cb) {
        for l in 0..4 {
            let t = u[l] - v[l];
            acc[l] += t * t;
        }
    }
    let mut tail = 0.0;
    for (u, v) in ra.iter().zip(rb) {
        tail += (u - v) * (u - v);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// k-nearest-neighbour vote under Euclidean distance. Distance ties go to the
/// lower training index and vote ties to the smaller class id. Scores are
/// vote fractions (`n_test × n_classes`).
pub fn knn_predict(
    train_x: ArrayView2<f64>,
    train_y: &[usize],
    test_x: ArrayView2<f64>,
    k: usize,
    n_classes: usize,
) -> Result<(Vec<usize>, Array2<f64>)> {
    check_train(train_x, train_y, n_classes)?;
    check_width(train_x, test_x)?;
    if k == 0 {
        return Err(Error::ConfigInvalid("k_neighbors must be at least 1".into()));
    }
    let k = k.min(train_x.nrows());
    let train = train_x.as_standard_layout();
    let test = test_x.as_standard_layout();
    let rows: Vec<Vec<f64>> = test
        .axis_iter(Axis(0))
        .into_par_iter()
        .map(|q| {
            let q = q.as_slice().expect("standard layout");
            let mut d: Vec<(f64, usize)> =
                train.outer_iter().enumerate().map(|(i, r)| (sq_dist(q, r.as_slice().expect("standard layout")), i)).collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < d.len() {
                d.select_nth_unstable_by(k - 1, cmp);
            }
            let mut votes = vec![0.0; n_classes];
            for &(_, i) in &d[..k] {
                votes[train_y[i]] += 1.0;
            }
            votes.iter().map(|v| v / k as f64).collect()
        })
        .collect();
    let scores = Array2::from_shape_fn((rows.len(), n_classes), |(i, c)| rows[i][c]);
    Ok((argmax_rows(&scores), scores))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNb {
    /// Log class frequency; `-inf` for classes absent from training.
    pub log_priors: Array1<f64>,
    pub means: Array2<f64>,
    /// Per-class population variances after flooring.
    pub variances: Array2<f64>,
    pub var_floor: f64,
}

impl GaussianNb {
    /// Variances are floored at `1e-9` times the largest feature variance of
    /// the whole training set (`1e-9` when every feature is constant).
    pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize) -> Result<Self> {
        check_train(x, y, n_classes)?;
        let d = x.ncols();
        let counts = crate::data::class_counts(y, n_classes);
        if counts.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::SingleClassTrain);
        }
        let mut means = Array2::<f64>::zeros((n_classes, d));
        for (row, &c) in x.outer_iter().zip(y) {
            let mut m = means.row_mut(c);
            m += &row;
        }
        for c in 0..n_classes {
            if counts[c] > 0 {
                means.row_mut(c).mapv_inplace(|v| v / counts[c] as f64);
            }
        }
        let mut variances = Array2::<f64>::zeros((n_classes, d));
        for (row, &c) in x.outer_iter().zip(y) {
            for j in 0..d {
                let t = row[j] - means[[c, j]];
                variances[[c, j]] += t * t;
            }
        }
        for c in 0..n_classes {
            if counts[c] > 0 {
                variances.row_mut(c).mapv_inplace(|v| v / counts[c] as f64);
            }
        }
        let global_max = x
            .axis_iter(Axis(1))
            .map(|col| {
                let m = col.sum() / col.len() as f64;
                col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / col.len() as f64
            })
            .fold(0.0f64, f64::max);
        let var_floor = if global_max > 0.0 { 1e-9 * global_max } else { 1e-9 };
        variances.mapv_inplace(|v| v.max(var_floor));
        let n = y.len() as f64;
        let log_priors =
            Array1::from_iter(counts.iter().map(|&c| if c > 0 { (c as f64 / n).ln() } else { f64::NEG_INFINITY }));
        Ok(Self { log_priors, means, variances, var_floor })
    }

    /// Normalized class log-posteriors, one row per sample.
    pub fn log_posteriors(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.means.ncols() {
            return Err(Error::ShapeMismatch(format!("model has {} features, input {}", self.means.ncols(), x.ncols())));
        }
        let c = self.log_priors.len();
        let log_norm: Vec<f64> = (0..c)
            .map(|k| self.variances.row(k).iter().map(|v| (2.0 * std::f64::consts::PI * v).ln()).sum::<f64>())
            .collect();
        let mut out = Array2::zeros((x.nrows(), c));
        for (i, row) in x.outer_iter().enumerate() {
            for k in 0..c {
                if self.log_priors[k] == f64::NEG_INFINITY {
                    out[[i, k]] = f64::NEG_INFINITY;
                    continue;
                }
                let mut q = 0.0;
                for j in 0..row.len() {
                    let t = row[j] - self.means[[k, j]];
                    q += t * t / self.variances[[k, j]];
                }
                out[[i, k]] = self.log_priors[k] - 0.5 * (log_norm[k] + q);
            }
            let mut r = out.row_mut(i);
            let top = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = top + r.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
            r.mapv_inplace(|v| v - lse);
        }
        Ok(out)
    }
}

/// One-vs-rest linear classifiers with a bias term, trained by the Pegasos
/// stochastic subgradient method on the hinge loss. The bias is treated as a
/// weight on a constant unit feature and is regularized with the rest. The
/// returned model is the average of the iterates over the second half of
/// the steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    /// `n_classes × d`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl LinearSvm {
    pub fn fit(x: ArrayView2<f64>, y: &[usize], n_classes: usize, cfg: &ClassifierConfig) -> Result<Self> {
        check_train(x, y, n_classes)?;
        cfg.validate()?;
        let (n, d) = x.dim();
        let xs = x.as_standard_layout();
        let lambda = cfg.svm_lambda;
        let radius = 1.0 / lambda.sqrt();
        // row c holds the weights followed by the bias
        let mut w = Array2::<f64>::zeros((n_classes, d + 1));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..n).collect();
        let total = cfg.svm_epochs * n;
        let start_avg = total / 2;
        let mut avg = Array2::<f64>::zeros((n_classes, d + 1));
        let mut t = 0usize;
        for _ in 0..cfg.svm_epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let xi = xs.row(i);
                let xi = xi.as_slice().expect("standard layout");
                for c in 0..n_classes {
                    let mut wc = w.row_mut(c);
                    let wc = wc.as_slice_mut().expect("standard layout");
                    let target = if y[i] == c { 1.0 } else { -1.0 };
                    let margin = target * (dot(&wc[..d], xi) + wc[d]);
                    let shrink = 1.0 - eta * lambda;
                    wc.iter_mut().for_each(|v| *v *= shrink);
                    if margin < 1.0 {
                        for (v, &xv) in wc[..d].iter_mut().zip(xi) {
                            *v += eta * target * xv;
                        }
                        wc[d] += eta * target;
                    }
                    let norm = wc.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > radius {
                        let s = radius / norm;
                        wc.iter_mut().for_each(|v| *v *= s);
                    }
                }
                if t > start_avg {
                    avg += &w;
                }
            }
        }
        avg /= (total - start_avg) as f64;
        let weights = avg.slice(ndarray::s![.., ..d]).to_owned();
        let bias = avg.column(d).to_owned();
        Ok(Self { weights, bias })
    }

    /// `w_c · x + b_c` for every sample and class.
    pub fn decision_values(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.weights.ncols() {
            return Err(Error::ShapeMismatch(format!("model has {} features, input {}", self.weights.ncols(), x.ncols())));
        }
        let mut out = x.dot(&self.weights.t());
        out += &self.bias;
        Ok(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Describes the first column whose mean is not 0 or whose standard deviation
/// is neither 0 nor 1, within 1e-6.
pub fn standardization_issue(x: ArrayView2<f64>) -> Option<String> {
    let n = x.nrows() as f64;
    x.axis_iter(Axis(1)).enumerate().find_map(|(j, col)| {
        let m = col.sum() / n;
        let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
        let ok = m.abs() <= 1e-6 && (s <= 1e-12 || (s - 1.0).abs() <= 1e-6);
        (!ok).then(|| format!("column {j} has mean {m:.3e} and std {s:.3e}"))
    })
}

fn labelled(ds: &Dataset) -> Result<&[usize]> {
    ds.labels()
}

fn shared_classes(train: &Dataset, test: &Dataset) -> Result<usize> {
    if train.label_names != test.label_names {
        return Err(Error::ConfigInvalid("train and test use different label vocabularies".into()));
    }
    Ok(train.n_classes())
}

pub fn classify_knn(train: &Dataset, test: &Dataset, k_neighbors: usize) -> Result<MetricsReport> {
    let c = shared_classes(train, test)?;
    let (pred, scores) = knn_predict(train.x.view(), labelled(train)?, test.x.view(), k_neighbors, c)?;
    let mut r = evaluate(ClassifierKind::Knn.id(), labelled(test)?, &pred, scores.view(), c)?;
    r.notes.push(format!("k_neighbors={k_neighbors}"));
    Ok(r)
}

pub fn classify_gnb(train: &Dataset, test: &Dataset) -> Result<MetricsReport> {
    let c = shared_classes(train, test)?;
    let model = GaussianNb::fit(train.x.view(), labelled(train)?, c)?;
    let scores = model.log_posteriors(test.x.view())?;
    let mut r = evaluate(ClassifierKind::Gnb.id(), labelled(test)?, &argmax_rows(&scores), scores.view(), c)?;
    r.notes.push(format!("variance_floor={:e}", model.var_floor));
    Ok(r)
}

pub fn classify_linear_svm(train: &Dataset, test: &Dataset, cfg: &ClassifierConfig) -> Result<MetricsReport> {
    let c = shared_classes(train, test)?;
    let mut notes = vec![format!(
        "linear one-vs-rest hinge loss, lambda={:e}, epochs={}, seed={}",
        cfg.svm_lambda, cfg.svm_epochs, cfg.seed
    )];
    if let Some(issue) = standardization_issue(train.x.view()) {
        if cfg.strict {
            return Err(Error::NotStandardized(issue));
        }
        log::warn!("linear SVM input is not standardized: {issue}");
        notes.push(format!("warning: training features not standardized ({issue})"));
    }
    let model = LinearSvm::fit(train.x.view(), labelled(train)?, c, cfg)?;
    let scores = model.decision_values(test.x.view())?;
    let mut r = evaluate(ClassifierKind::LinearSvm.id(), labelled(test)?, &argmax_rows(&scores), scores.view(), c)?;
    r.notes.extend(notes);
    Ok(r)
}

pub fn classify(kind: ClassifierKind, train: &Dataset, test: &Dataset, cfg: &ClassifierConfig) -> Result<MetricsReport> {
    match kind {
        ClassifierKind::Knn => classify_knn(train, test, cfg.knn_k),
        ClassifierKind::Gnb => classify_gnb(train, test),
        ClassifierKind::LinearSvm => classify_linear_svm(train, test, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{standardize_matrix, Split};
    use ndarray::array;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn blobs(n: usize, d: usize, c: usize, spread: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = Array2::from_shape_fn((c, d), |_| 3.0 * rng.sample::<f64, _>(StandardNormal));
        let y: Vec<usize> = (0..n).map(|i| i % c).collect();
        let x = Array2::from_shape_fn((n, d), |(i, j)| centers[[y[i], j]] + spread * rng.sample::<f64, _>(StandardNormal));
        (x, y)
    }

    fn ds(x: Array2<f64>, y: Vec<usize>, c: usize, split: Split) -> Dataset {
        let d = x.ncols();
        Dataset::new(x, Some(y), (0..d).map(|j| format!("f{j}")).collect(), (0..c).map(|k| format!("c{k}")).collect(), split)
            .unwrap()
    }

    #[test]
    fn knn_examples() {
        let train = array![[0.0, 0.0], [5.0, 5.0], [10.0, 0.0]];
        let (p, _) = knn_predict(train.view(), &[2, 0, 1], array![[5.0, 5.0]].view(), 1, 3).unwrap();
        assert_eq!(p, vec![0]);
        let (p, s) = knn_predict(array![[0.0], [1.0]].view(), &[1, 0], array![[7.0]].view(), 2, 2).unwrap();
        assert_eq!(p, vec![0]);
        assert_eq!(s.row(0).to_vec(), vec![0.5, 0.5]);
        // equidistant neighbours: the lower training index wins
        let (p, _) = knn_predict(array![[-1.0], [1.0]].view(), &[1, 0], array![[0.0]].view(), 1, 2).unwrap();
        assert_eq!(p, vec![1]);
        assert!(matches!(knn_predict(Array2::zeros((0, 1)).view(), &[], array![[0.0]].view(), 1, 2), Err(Error::EmptyTrain)));
    }

    #[test]
    fn knn_matches_brute_force_scan() {
        let (x, y) = blobs(100, 4, 3, 1.5, 1);
        let (q, _) = blobs(40, 4, 3, 2.0, 2);
        for k in [1, 4, 5, 9] {
            let (pred, _) = knn_predict(x.view(), &y, q.view(), k, 3).unwrap();
            let naive: Vec<usize> = q
                .outer_iter()
                .map(|qr| {
                    let mut taken = vec![false; x.nrows()];
                    let mut votes = [0usize; 3];
                    for _ in 0..k {
                        let mut best: Option<(f64, usize)> = None;
                        for (i, xr) in x.outer_iter().enumerate() {
                            let dist: f64 = xr.iter().zip(qr.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                            if !taken[i] && best.map_or(true, |(bd, _)| dist < bd) {
                                best = Some((dist, i));
                            }
                        }
                        let i = best.unwrap().1;
                        taken[i] = true;
                        votes[y[i]] += 1;
                    }
                    (0..3).fold(0, |b, c| if votes[c] > votes[b] { c } else { b })
                })
                .collect();
            assert_eq!(pred, naive, "k = {k}");
        }
    }

    #[test]
    fn gnb_examples() {
        let x = array![[-10.0], [-10.2], [-9.8], [10.0], [10.2], [9.8]];
        let y = [0, 0, 0, 1, 1, 1];
        let m = GaussianNb::fit(x.view(), &y, 2).unwrap();
        assert_eq!(argmax_rows(&m.log_posteriors(array![[-10.0], [10.0]].view()).unwrap()), vec![0, 1]);
        // symmetric classes: the midpoint is an exact tie
        let lp = m.log_posteriors(array![[0.0]].view()).unwrap();
        assert_eq!(lp[[0, 0]], lp[[0, 1]]);
        assert_eq!(argmax_rows(&lp), vec![0]);
        assert!(matches!(GaussianNb::fit(x.view(), &[1; 6], 2), Err(Error::SingleClassTrain)));
    }

    #[test]
    fn gnb_matches_naive_density() {
        let (x, y) = blobs(60, 5, 3, 1.0, 3);
        let (q, _) = blobs(10, 5, 3, 2.0, 4);
        let m = GaussianNb::fit(x.view(), &y, 3).unwrap();
        let lp = m.log_posteriors(q.view()).unwrap();
        for (i, qr) in q.outer_iter().enumerate() {
            let mut joint = [0.0; 3];
            for c in 0..3 {
                let rows: Vec<usize> = (0..60).filter(|&r| y[r] == c).collect();
                let mut lj = (rows.len() as f64 / 60.0).ln();
                for j in 0..5 {
                    let mu = rows.iter().map(|&r| x[[r, j]]).sum::<f64>() / rows.len() as f64;
                    let var = rows.iter().map(|&r| (x[[r, j]] - mu).powi(2)).sum::<f64>() / rows.len() as f64;
                    let dens = (-(qr[j] - mu).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
                    lj += dens.ln();
                }
                joint[c] = lj;
            }
            let evidence = joint.iter().map(|v| v.exp()).sum::<f64>().ln();
            for c in 0..3 {
                assert!((lp[[i, c]] - (joint[c] - evidence)).abs() < 1e-10, "{} vs {}", lp[[i, c]], joint[c] - evidence);
            }
        }
    }

    #[test]
    fn svm_separable_and_degenerate() {
        let (x, y) = blobs(80, 3, 2, 0.3, 5);
        let (xs, _) = standardize_matrix(x.view());
        let cfg = ClassifierConfig::default();
        let m = LinearSvm::fit(xs.view(), &y, 2, &cfg).unwrap();
        assert_eq!(argmax_rows(&m.decision_values(xs.view()).unwrap()), y);

        let flat = Array2::zeros((10, 4));
        let y: Vec<usize> = vec![0, 1, 1, 1, 2, 1, 1, 1, 0, 1];
        let m = LinearSvm::fit(flat.view(), &y, 3, &cfg).unwrap();
        assert!(argmax_rows(&m.decision_values(flat.view()).unwrap()).iter().all(|&p| p == 1));
    }

    #[test]
    fn svm_decision_values_match_dot_products() {
        let (x, y) = blobs(50, 6, 3, 1.0, 6);
        let m = LinearSvm::fit(x.view(), &y, 3, &ClassifierConfig { svm_epochs: 3, ..Default::default() }).unwrap();
        let dv = m.decision_values(x.view()).unwrap();
        for i in 0..50 {
            for c in 0..3 {
                let mut s = m.bias[c];
                for j in 0..6 {
                    s += m.weights[[c, j]] * x[[i, j]];
                }
                assert!((dv[[i, c]] - s).abs() <= 1e-12 * s.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reports_are_deterministic_and_consistent() {
        let (x, y) = blobs(90, 4, 3, 2.0, 7);
        let (q, qy) = blobs(45, 4, 3, 2.0, 8);
        let train = ds(x, y, 3, Split::Train);
        let test = ds(q, qy, 3, Split::Test);
        let cfg = ClassifierConfig::default();
        for kind in ClassifierKind::ALL {
            let a = classify(kind, &train, &test, &cfg).unwrap();
            assert_eq!(a, classify(kind, &train, &test, &cfg).unwrap());
            let total: usize = a.confusion.iter().flatten().sum();
            assert_eq!(total, 45);
            for c in 0..3 {
                assert_eq!(a.confusion[c].iter().sum::<usize>(), 15);
            }
            let trace: usize = (0..3).map(|c| a.confusion[c][c]).sum();
            assert!((a.accuracy - trace as f64 / 45.0).abs() <= 1e-12);
        }
        let strict = ClassifierConfig { strict: true, ..Default::default() };
        assert!(matches!(classify_linear_svm(&train, &test, &strict), Err(Error::NotStandardized(_))));
        let warned = classify_linear_svm(&train, &test, &cfg).unwrap();
        assert!(warned.notes.iter().any(|n| n.contains("not standardized")));
    }

    #[test]
    fn classifier_names_parse() {
        for k in ClassifierKind::ALL {
            assert_eq!(k.id().parse::<ClassifierKind>().unwrap(), k);
        }
        assert_eq!("SVM".parse::<ClassifierKind>().unwrap(), ClassifierKind::LinearSvm);
        assert!("tree".parse::<ClassifierKind>().is_err());
    }
}

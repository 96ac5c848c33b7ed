use std::time::Instant;

use ndarray::Axis;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifiers::{classify, ClassifierConfig, ClassifierKind};
use super::metrics::MetricsReport;
use crate::data::{standardize, Dataset, Split};
use crate::error::{Error, Result};
use crate::selector::{run_msle, select_top_k, MsleConfig, PhaseTimings, SelectionMeta, ViewSet};

pub const REDUCTION_CONVENTION: &str =
    "reduction_percent is the share of features removed: k = round(d * (1 - r / 100)) features are kept";

pub const ALPHA_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

/// Number of features kept at reduction `r` percent, for `0 <= r < 100`.
pub fn kept_features(d: usize, r: f64) -> Result<usize> {
    if !(0.0..100.0).contains(&r) {
        return Err(Error::ConfigInvalid(format!("reduction percent must lie in [0, 100), got {r}")));
    }
    let k = (d as f64 * (1.0 - r / 100.0)).round() as usize;
    if k == 0 {
        return Err(Error::ConfigInvalid(format!("reduction {r}% of {d} features keeps none")));
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOptions {
    pub reductions: Vec<f64>,
    pub classifiers: Vec<ClassifierKind>,
    pub classifier: ClassifierConfig,
    /// Standardize both splits with training statistics before selection and classification.
    pub standardize: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            reductions: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0],
            classifiers: ClassifierKind::ALL.to_vec(),
            classifier: ClassifierConfig::default(),
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub reduction_percent: f64,
    pub k: usize,
    /// Ascending indices of the kept features.
    pub features: Vec<usize>,
    /// One report per classifier, in the requested order.
    pub reports: Vec<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyTiming {
    pub reduction_percent: f64,
    pub classifier: ClassifierKind,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTimings {
    pub selection: Option<PhaseTimings>,
    pub selection_total_s: f64,
    pub classify: Vec<ClassifyTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n_train: usize,
    pub n_test: usize,
    pub n_features: usize,
    pub label_names: Vec<String>,
    pub reduction_convention: String,
    pub standardized: bool,
    pub classifier_config: ClassifierConfig,
    pub selector_config: MsleConfig,
    /// Absent when no point needed a selection.
    pub selection: Option<SelectionMeta>,
    pub points: Vec<SweepPoint>,
    /// Wall-clock data, excluded from the document so reruns compare equal.
    #[serde(skip)]
    pub timings: SweepTimings,
}

fn prepared(train: &Dataset, test: &Dataset, standardize_first: bool) -> Result<(Dataset, Dataset)> {
    train.labels()?;
    test.labels()?;
    if train.n_features() != test.n_features() {
        return Err(Error::ShapeMismatch(format!(
            "train has {} features, test has {}",
            train.n_features(),
            test.n_features()
        )));
    }
    if standardize_first {
        let (tr, te, _) = standardize(train, test)?;
        Ok((tr, te))
    } else {
        Ok((train.clone(), test.clone()))
    }
}

/// Selects features on the training split at every reduction and evaluates
/// every classifier on the matching columns of the test split. One selector
/// run supplies the scores for all reductions, so kept sets are nested.
pub fn sweep_reduction(
    train: &Dataset,
    test: &Dataset,
    views: &ViewSet,
    selector: &MsleConfig,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    opts.classifier.validate()?;
    if opts.reductions.is_empty() || opts.classifiers.is_empty() {
        return Err(Error::ConfigInvalid("a sweep needs at least one reduction and one classifier".into()));
    }
    let d = train.n_features();
    let ks = opts.reductions.iter().map(|&r| kept_features(d, r)).collect::<Result<Vec<_>>>()?;
    let (tr, te) = prepared(train, test, opts.standardize)?;

    let mut timings = SweepTimings::default();
    let k_select = ks.iter().copied().filter(|&k| k < d).max();
    let selection = match k_select {
        Some(k) => {
            let t0 = Instant::now();
            let sel = run_msle(tr.x.view(), views, k, selector)?;
            timings.selection_total_s = t0.elapsed().as_secs_f64();
            timings.selection = Some(sel.timings.clone());
            Some(sel)
        }
        None => None,
    };
    let features: Vec<Vec<usize>> = ks
        .iter()
        .map(|&k| match &selection {
            Some(sel) if k < d => select_top_k(&sel.scores, k),
            _ => (0..d).collect(),
        })
        .collect();

    let jobs: Vec<(usize, ClassifierKind)> =
        (0..ks.len()).flat_map(|p| opts.classifiers.iter().map(move |&c| (p, c))).collect();
    let results = jobs
        .par_iter()
        .map(|&(p, kind)| {
            let t0 = Instant::now();
            let cols = &features[p];
            let mut report = classify(kind, &tr.select_features(cols)?, &te.select_features(cols)?, &opts.classifier)?;
            report.feature_count = cols.len();
            report.reduction_percent = opts.reductions[p];
            report.notes.push(REDUCTION_CONVENTION.to_string());
            Ok((report, t0.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points: Vec<SweepPoint> = ks
        .iter()
        .zip(&opts.reductions)
        .zip(features)
        .map(|((&k, &r), features)| SweepPoint { reduction_percent: r, k, features, reports: Vec::new() })
        .collect();
    for (&(p, kind), (report, secs)) in jobs.iter().zip(results) {
        timings.classify.push(ClassifyTiming { reduction_percent: opts.reductions[p], classifier: kind, seconds: secs });
        points[p].reports.push(report);
    }
    Ok(SweepReport {
        n_train: tr.n_samples(),
        n_test: te.n_samples(),
        n_features: d,
        label_names: tr.label_names.clone(),
        reduction_convention: REDUCTION_CONVENTION.to_string(),
        standardized: opts.standardize,
        classifier_config: opts.classifier.clone(),
        selector_config: selector.clone(),
        selection: selection.map(|s| s.meta),
        points,
        timings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCv {
    pub grid: Vec<f64>,
    /// Mean held-out accuracy per grid value.
    pub mean_accuracy: Vec<f64>,
    /// Grid value with the highest mean accuracy, the earliest on ties.
    pub best: f64,
}

fn rows(ds: &Dataset, idx: &[usize], split: Split) -> Result<Dataset> {
    let y = ds.labels()?;
    Dataset::new(
        ds.x.select(Axis(0), idx),
        Some(idx.iter().map(|&i| y[i]).collect()),
        ds.feature_names.clone(),
        ds.label_names.clone(),
        split,
    )
}

/// Chooses one alpha, broadcast to every view, by `folds`-fold
/// cross-validated accuracy of `classifier` on the top `k` features.
/// Labels are used here only; the selector itself never sees them.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate_alpha(
    train: &Dataset,
    views: &ViewSet,
    k: usize,
    selector: &MsleConfig,
    grid: &[f64],
    classifier: ClassifierKind,
    clf_cfg: &ClassifierConfig,
    folds: usize,
) -> Result<AlphaCv> {
    if grid.is_empty() || folds < 2 || folds > train.n_samples() {
        return Err(Error::ConfigInvalid(format!(
            "cross-validation needs a nonempty grid and 2 <= folds <= n, got {} values and {folds} folds",
            grid.len()
        )));
    }
    let mut order: Vec<usize> = (0..train.n_samples()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(selector.seed));
    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let held: Vec<usize> = order.iter().copied().skip(f).step_by(folds).collect();
        let mut fit: Vec<usize> = order.iter().enumerate().filter(|(p, _)| p % folds != f).map(|(_, &i)| i).collect();
        fit.sort_unstable();
        let (a, b) = prepared(&rows(train, &fit, Split::Train)?, &rows(train, &held, Split::Test)?, true)?;
        splits.push((a, b));
    }
    let mut mean_accuracy = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let cfg = MsleConfig { alphas: vec![alpha], ..selector.clone() };
        let mut total = 0.0;
        for (fit, held) in &splits {
            let sel = run_msle(fit.x.view(), views, k, &cfg)?;
            let r = classify(classifier, &fit.select_features(&sel.selected)?, &held.select_features(&sel.selected)?, clf_cfg)?;
            total += r.accuracy;
        }
        mean_accuracy.push(total / folds as f64);
    }
    let best_i = (0..grid.len()).fold(0, |b, i| if mean_accuracy[i] > mean_accuracy[b] { i } else { b });
    Ok(AlphaCv { grid: grid.to_vec(), mean_accuracy, best: grid[best_i] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic_ucihar, SyntheticSpec};
    use crate::selector::GraphMode;

    #[test]
    fn kept_feature_arithmetic() {
        assert_eq!(kept_features(561, 80.0).unwrap(), 112);
        assert_eq!(kept_features(561, 50.0).unwrap(), 281);
        assert_eq!(kept_features(561, 90.0).unwrap(), 56);
        assert_eq!(kept_features(561, 0.0).unwrap(), 561);
        assert_eq!(kept_features(30, 10.0).unwrap(), 27);
        assert!(kept_features(10, 100.0).is_err());
        assert!(kept_features(10, -1.0).is_err());
        assert!(kept_features(1, 90.0).is_err());
    }

    fn small() -> (Dataset, Dataset) {
        let (tr, te) = synthetic_ucihar(&SyntheticSpec { n_train: 150, n_test: 60, ..Default::default() }).unwrap();
        let cols: Vec<usize> = (0..40).map(|j| j * 14).collect();
        (tr.select_features(&cols).unwrap(), te.select_features(&cols).unwrap())
    }

    #[test]
    fn sweep_points_are_nested_and_baseline_matches() {
        let (tr, te) = small();
        let views = ViewSet::contiguous(40, 2).unwrap();
        let cfg = MsleConfig { graph: GraphMode::Dense, n_components: 4, ..Default::default() };
        let opts = SweepOptions { reductions: vec![0.0, 50.0, 80.0, 90.0], ..Default::default() };
        let rep = sweep_reduction(&tr, &te, &views, &cfg, &opts).unwrap();
        assert_eq!(rep.points.iter().map(|p| p.k).collect::<Vec<_>>(), vec![40, 20, 8, 4]);
        for w in rep.points.windows(2) {
            assert!(w[1].features.iter().all(|f| w[0].features.contains(f)));
        }
        let (a, b, _) = standardize(&tr, &te).unwrap();
        for (kind, r) in opts.classifiers.iter().zip(&rep.points[0].reports) {
            let mut direct = classify(*kind, &a, &b, &opts.classifier).unwrap();
            direct.feature_count = 40;
            direct.notes.push(REDUCTION_CONVENTION.into());
            assert_eq!(&direct, r);
        }
        assert_eq!(rep.points.iter().map(|p| p.reports.len()).sum::<usize>(), 12);
        let again = sweep_reduction(&tr, &te, &views, &cfg, &opts).unwrap();
        assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn alpha_cross_validation_picks_a_grid_value() {
        let (tr, _) = small();
        let views = ViewSet::contiguous(40, 2).unwrap();
        let cfg = MsleConfig { graph: GraphMode::Dense, n_components: 4, ..Default::default() };
        let cv = cross_validate_alpha(&tr, &views, 10, &cfg, &ALPHA_GRID, ClassifierKind::Knn, &ClassifierConfig::default(), 3)
            .unwrap();
        assert_eq!(cv.mean_accuracy.len(), 4);
        assert!(cv.mean_accuracy.iter().all(|a| (0.0..=1.0).contains(a)));
        let best = cv.mean_accuracy.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(cv.mean_accuracy[ALPHA_GRID.iter().position(|&a| a == cv.best).unwrap()], best);
    }
}

//! Classifier baselines, metrics and the feature-reduction sweep.

mod classifiers;
mod metrics;
mod report;
mod sweep;

pub use classifiers::{
    classify, classify_gnb, classify_knn, classify_linear_svm, knn_predict, standardization_issue, ClassifierConfig,
    ClassifierKind, GaussianNb, LinearSvm,
};
pub use metrics::{
    argmax_rows, auc, confusion_matrix, evaluate, macro_averages, per_class_metrics, roc_curve, ClassRoc, MetricsReport,
    PerClass, RocPoint,
};
pub use report::{confusion_rows, roc_rows, table2_rows, table3_rows, timing_rows, write_report, write_sweep};
pub use sweep::{
    cross_validate_alpha, kept_features, sweep_reduction, AlphaCv, ClassifyTiming, SweepOptions, SweepPoint, SweepReport,
    SweepTimings, ALPHA_GRID, REDUCTION_CONVENTION,
};

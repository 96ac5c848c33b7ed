use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("mass matrix entry {index} is not positive ({value:e})")]
    SingularMass { index: usize, value: f64 },

    #[error("matrix is not positive definite (failed pivot at row {0} after jitter)")]
    NotPositiveDefinite(usize),

    #[error("kernel bandwidth must be positive, got {0}")]
    BandwidthZero(f64),

    #[error("k_nn = {k} must satisfy 1 <= k_nn < n = {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("vertex {0} has zero degree")]
    IsolatedVertex(usize),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("embedding dimension {d_embed} (+{extra} trivial) exceeds sample count {n}")]
    EmbedDimTooLarge { d_embed: usize, extra: usize, n: usize },

    #[error("eigenvalue {value:e} of column {column} is too small for out-of-sample extension")]
    ZeroEigenvalue { column: usize, value: f64 },

    #[error("objective increased for {0} consecutive steps")]
    DivergenceDetected(usize),

    #[error("view '{0}' has no columns")]
    EmptyView(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("dataset layout not found under {}: {reason}", path.display())]
    LayoutNotFound { path: PathBuf, reason: String },

    #[error("{}: expected {expected}, found {found}", file.display())]
    DataShape { file: PathBuf, expected: String, found: String },

    #[error("ragged rows: data row {row} has {found} cells, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },

    #[error("non-numeric cell at data row {row}, column {col}: '{value}'")]
    NonNumericCell { row: usize, col: usize, value: String },

    #[error("unsupported schema version {found} (this build reads {supported})")]
    SchemaVersionMismatch { found: u32, supported: u32 },

    #[error("malformed file {}: {reason}", path.display())]
    Malformed { path: PathBuf, reason: String },

    #[error("training set is empty")]
    EmptyTrain,

    #[error("training set contains a single class")]
    SingleClassTrain,

    #[error("features are not standardized: {0}")]
    NotStandardized(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            NoConvergence { .. }
            | SingularMass { .. }
            | NotPositiveDefinite(_)
            | ZeroEigenvalue { .. }
            | DivergenceDetected(_)
            | IsolatedVertex(_) => ErrorCategory::Numerical,
            ConfigInvalid(_) | KTooLarge { .. } | EmbedDimTooLarge { .. } | BandwidthZero(_)
            | EmptyView(_) | NotStandardized(_) => ErrorCategory::Config,
            NonFinite(_) | NotSymmetric { .. } | ShapeMismatch(_) | DegenerateData(_)
            | LayoutNotFound { .. } | DataShape { .. } | RaggedRows { .. }
            | NonNumericCell { .. } | SchemaVersionMismatch { .. } | Malformed { .. }
            | EmptyTrain | SingleClassTrain | Io(_) | Json(_) | Csv(_) => ErrorCategory::Data,
        }
    }

    /// Stable identifier for machine-readable error documents.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            NonFinite(_) => "NonFinite",
            NotSymmetric { .. } => "NotSymmetric",
            ShapeMismatch(_) => "ShapeMismatch",
            NoConvergence { .. } => "NoConvergence",
            SingularMass { .. } => "SingularMass",
            NotPositiveDefinite(_) => "NotPositiveDefinite",
            BandwidthZero(_) => "BandwidthZero",
            KTooLarge { .. } => "KTooLarge",
            IsolatedVertex(_) => "IsolatedVertex",
            DegenerateData(_) => "DegenerateData",
            EmbedDimTooLarge { .. } => "EmbedDimTooLarge",
            ZeroEigenvalue { .. } => "ZeroEigenvalue",
            DivergenceDetected(_) => "DivergenceDetected",
            EmptyView(_) => "EmptyView",
            ConfigInvalid(_) => "ConfigInvalid",
            LayoutNotFound { .. } => "LayoutNotFound",
            DataShape { .. } => "ShapeMismatch",
            RaggedRows { .. } => "RaggedRows",
            NonNumericCell { .. } => "NonNumericCell",
            SchemaVersionMismatch { .. } => "SchemaVersionMismatch",
            Malformed { .. } => "Malformed",
            EmptyTrain => "EmptyTrain",
            SingleClassTrain => "SingleClassTrain",
            NotStandardized(_) => "NotStandardized",
            Io(_) => "Io",
            Json(_) => "Json",
            Csv(_) => "Csv",
        }
    }
}

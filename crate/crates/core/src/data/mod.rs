//! Dataset ingestion, standardization and artifact persistence.

mod container;
mod dataset;
mod delimited;
mod synthetic;
pub mod ucihar;

pub use container::{
    load_embedding, load_selection, read_matrices, save_embedding, save_selection, sidecar_path, write_matrices,
    FORMAT_VERSION, MAGIC, SCHEMA_VERSION,
};
pub use dataset::{class_counts, standardize, standardize_matrix, Dataset, Split, Standardizer};
pub use delimited::{load_delimited, save_dataset, DelimitedOptions, LabelColumn};
pub use synthetic::{proportional_counts, synthetic_ucihar, write_ucihar_layout, SyntheticSpec};
pub use ucihar::{load_ucihar, signal_family_views, UciHarOptions};

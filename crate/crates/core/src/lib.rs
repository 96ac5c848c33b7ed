pub mod data;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod optim;
pub mod selector;

pub use error::{Error, ErrorCategory, Result};

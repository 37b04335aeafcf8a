//! Graph fraud detection with a hybrid spectral filter bank and a local
//! environment constraint, plus spectral diagnostics and experiment harnesses.

pub mod data;
pub mod error;
pub mod experiments;
pub mod filterbank;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod train;

pub use data::{Dataset, SplitMasks, SyntheticConfig};
pub use error::{Error, Result};
pub use graph::{Label, LabelVector, LaplacianKind, SparseGraph, SparseMatrix};
pub use model::{ModelConfig, SecGfdParams};
pub use train::{MetricsReport, TrainConfig, TrainedModel};

//! RBF epsilon-SVR mapping GREED features to quality scores.

mod grid;
mod model_io;
mod smo;
mod svr;

use thiserror::Error;

pub use grid::{default_grid, grid_search, GridResult};
pub use model_io::{load_model, save_model, ModelFile, MODEL_FORMAT, MODEL_VERSION};
pub use smo::{solve_epsilon_svr, SmoSolution};
pub use svr::{predict, train_svr, Hyperparams, Standardizer, SvrModel};

#[derive(Debug, Error)]
pub enum RegressionError {
    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),
    #[error("{features} feature rows but {labels} labels")]
    LabelCount { features: usize, labels: usize },
    #[error("row {row} has {got} features, expected {expected}")]
    Dimension { row: usize, expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("unsupported model file version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("model file: {0}")]
    Parse(String),
    #[error("corrupt model field '{0}'")]
    Corrupt(String),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

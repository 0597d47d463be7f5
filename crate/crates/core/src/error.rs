use thiserror::Error;

use crate::bandpass::BandpassError;
use crate::dataset::DatasetError;
use crate::evaluation::EvalError;
use crate::features::FeatureError;
use crate::ggd::GgdError;
use crate::regression::RegressionError;
use crate::video_io::VideoError;

/// Any error produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Video(#[from] VideoError),
    #[error(transparent)]
    Bandpass(#[from] BandpassError),
    #[error(transparent)]
    Ggd(#[from] GgdError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

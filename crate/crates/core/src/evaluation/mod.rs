//! Correlation metrics, logistic score mapping, the randomized
//! content-disjoint split protocol and score fusion.

mod histogram;
mod logistic;
mod protocol;
mod rank;

use thiserror::Error;

pub use histogram::{dump_histogram, histogram_values, Histogram};
pub use logistic::{fit_logistic, nelder_mead, plcc_rmse, LogisticFit, LogisticParams, PlccRmse, MAX_ITERATIONS};
pub use protocol::{run_protocol, split_contents, EvalReport, ProtocolConfig, Sample, Split, TrialResult};
pub use rank::{krocc, mid_ranks, pearson, srocc};

use crate::regression::RegressionError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("need at least 3 distinct contents, got {0}")]
    TooFewContents(usize),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("VMAF score {0} outside [0, 100]")]
    VmafRange(f64),
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("histogram input is empty")]
    EmptyInput,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Regression(#[from] RegressionError),
}

/// Fuses an externally computed VMAF(PR, D) with a GREED score. VMAF is
/// flipped to `100 - vmaf` so both terms grow with distortion.
pub fn hfr_vmaf(vmaf: f64, greed: f64) -> Result<f64, EvalError> {
    if !(0.0..=100.0).contains(&vmaf) {
        return Err(EvalError::VmafRange(vmaf));
    }
    if !greed.is_finite() {
        return Err(EvalError::NonFinite("greed score"));
    }
    Ok(0.5 * ((100.0 - vmaf) + greed))
}

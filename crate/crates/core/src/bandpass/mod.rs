//! Temporal wavelet-packet band-pass filtering and spatial mean subtraction.

mod packet;
mod spatial;
pub(crate) mod temporal;

use thiserror::Error;

pub use packet::{build_packet_filters, FilterBank, Wavelet};
pub use spatial::{gaussian_window, spatial_ms, spatial_ms_frames, GAUSSIAN_HALF_WIDTH, GAUSSIAN_SIGMA};
pub use temporal::{mirror_index, temporal_filter, SubbandStack};

#[derive(Debug, Error)]
pub enum BandpassError {
    #[error("unknown wavelet '{0}' (expected haar, db2 or bior2.2)")]
    UnknownWavelet(String),
    #[error("decomposition depth must be at least 1")]
    ZeroLevels,
    #[error("temporal filtering needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("filter of length {taps} is longer than 4x the {frames}-frame signal")]
    SignalTooShort { taps: usize, frames: usize },
}

//! Generalized entropic difference (GREED) video quality assessment.
//!
//! GREED scores a distorted video against a reference that may have a
//! different frame rate. Temporal band-pass responses (a wavelet packet
//! filter bank applied along time) and spatial mean-subtracted responses are
//! modelled as generalized Gaussian, their locally scaled entropies are
//! compared between reference, pseudo-reference and distorted video, and the
//! resulting 16 features are fused by an RBF support vector regressor.
//!
//! The crate is organised bottom-up:
//!
//! * [`video_io`]: luma decoding, spatial pyramid, pseudo-reference.
//! * [`bandpass`]: wavelet packet filter bank, temporal and spatial filtering.
//! * [`ggd`]: generalized Gaussian moments, kurtosis matching and entropy.
//! * [`features`]: scaled entropies, TGREED/SGREED and the feature vector.
//! * [`regression`]: epsilon-SVR training, prediction and model files.
//! * [`evaluation`]: correlations, logistic mapping, split protocol.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise. Results are
//! bit-identical either way.

// `!(x > 0.0)` is used on purpose to reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bandpass;
pub mod dataset;
pub mod evaluation;
pub mod features;
pub mod ggd;
pub mod par;
pub mod regression;
pub mod video_io;

mod error;

pub use error::{Error, Result};

pub use bandpass::{build_packet_filters, spatial_ms, temporal_filter, FilterBank, SubbandStack, Wavelet};
pub use features::{compute_features, GreedConfig, GreedFeatures};
pub use ggd::GgdParams;
pub use regression::{predict, train_svr, Hyperparams, SvrModel};
pub use video_io::{FrameRate, LumaVideo, Plane};

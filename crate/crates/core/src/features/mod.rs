//! Scaled entropies, TGREED / SGREED indices and the GREED feature vector.

mod cache;
mod entropy;
mod indices;
mod pipeline;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bandpass::{BandpassError, Wavelet};
use crate::ggd::GgdError;
use crate::video_io::VideoError;

pub use cache::{FeatureCache, FeatureRecord};
pub use entropy::{average_reference_entropies, averaging_cells, block_entropies, EntropyField};
pub use indices::{sgreed_frame, tgreed_frame};
pub use pipeline::{compute_features, compute_features_multiscale, sgreed_series, tgreed_series, ScaleFeatures};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("reference is {ref_w}x{ref_h} but distorted is {dist_w}x{dist_h}; spatial resolutions must match")]
    ResolutionMismatch { ref_w: usize, ref_h: usize, dist_w: usize, dist_h: usize },
    #[error("{which} has {frames} frames at scale {scale}, too short for a {taps}-tap temporal filter")]
    TooShort { which: &'static str, frames: usize, taps: usize, scale: u32 },
    #[error("a {width}x{height} frame holds no {patch}x{patch} patch")]
    NoPatches { width: usize, height: usize, patch: usize },
    #[error("no frames to process")]
    NoFrames,
    #[error("entropy vectors differ in length: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rate ratio must be at least 1")]
    RateBelowOne,
    #[error("empty averaging cell starting at reference frame {0}")]
    EmptyCell(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("feature cache line {line}: {message}")]
    Cache { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Video(#[from] VideoError),
    #[error(transparent)]
    Bandpass(#[from] BandpassError),
    #[error(transparent)]
    Ggd(#[from] GgdError),
}

/// Which reference entropies SGREED compares the distorted frames against
/// when the frame rates differ. With equal rates both choices coincide.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialReference {
    /// Frames of the pseudo-reference, i.e. the reference subsampled to the
    /// distorted rate.
    #[default]
    Pseudo,
    /// Reference entropies averaged over each rate-ratio cell, like the
    /// temporal reference term.
    Averaged,
}

impl SpatialReference {
    pub fn name(self) -> &'static str {
        match self {
            SpatialReference::Pseudo => "pseudo",
            SpatialReference::Averaged => "averaged",
        }
    }
}

impl std::fmt::Display for SpatialReference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SpatialReference {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pseudo" => Ok(SpatialReference::Pseudo),
            "averaged" => Ok(SpatialReference::Averaged),
            other => Err(FeatureError::InvalidConfig(format!("unknown spatial reference '{other}' (pseudo|averaged)"))),
        }
    }
}

/// Everything that determines the feature values for a given input pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedConfig {
    pub wavelet: Wavelet,
    pub levels: u32,
    pub scales: Vec<u32>,
    pub noise_var: f64,
    pub patch: usize,
    #[serde(default)]
    pub spatial_reference: SpatialReference,
}

impl Default for GreedConfig {
    fn default() -> Self {
        GreedConfig {
            wavelet: Wavelet::Bior22,
            levels: 3,
            scales: vec![4, 5],
            noise_var: 0.1,
            patch: 5,
            spatial_reference: SpatialReference::Pseudo,
        }
    }
}

impl GreedConfig {
    pub fn with_wavelet(mut self, wavelet: Wavelet) -> Self {
        self.wavelet = wavelet;
        self
    }

    pub fn with_scales(mut self, scales: Vec<u32>) -> Self {
        self.scales = scales;
        self
    }

    pub fn with_levels(mut self, levels: u32) -> Self {
        self.levels = levels;
        self
    }

    pub fn with_spatial_reference(mut self, spatial_reference: SpatialReference) -> Self {
        self.spatial_reference = spatial_reference;
        self
    }

    pub fn bands(&self) -> usize {
        (1usize << self.levels) - 1
    }

    /// `|scales| * (1 + bands)`: 16 for the defaults.
    pub fn feature_len(&self) -> usize {
        self.scales.len() * (1 + self.bands())
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.scales.is_empty() {
            return Err(FeatureError::InvalidConfig("at least one scale is required".into()));
        }
        if self.levels == 0 || self.levels > 8 {
            return Err(FeatureError::InvalidConfig(format!("levels must be in 1..=8, got {}", self.levels)));
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(FeatureError::InvalidConfig(format!("noise variance must be positive, got {}", self.noise_var)));
        }
        if self.patch == 0 {
            return Err(FeatureError::InvalidConfig("patch size must be positive".into()));
        }
        Ok(())
    }

    fn canonical(&self) -> String {
        let scales: Vec<String> = self.scales.iter().map(u32::to_string).collect();
        format!(
            "greed;wavelet={};levels={};scales={};noise_var={:?};patch={};spatial_ref={}",
            self.wavelet,
            self.levels,
            scales.join(","),
            self.noise_var,
            self.patch,
            self.spatial_reference
        )
    }

    /// Short hash identifying this configuration in caches and model files.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Feature vector ordered `[scale_0: SGREED, TGREED_1..K, scale_1: ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedFeatures {
    pub values: Vec<f64>,
    pub config: GreedConfig,
}

impl GreedFeatures {
    fn per_scale(&self) -> usize {
        1 + self.config.bands()
    }

    pub fn sgreed(&self, scale_index: usize) -> f64 {
        self.values[scale_index * self.per_scale()]
    }

    /// TGREED of band `k` (1-based, increasing center frequency).
    pub fn tgreed(&self, scale_index: usize, k: usize) -> f64 {
        assert!((1..=self.config.bands()).contains(&k));
        self.values[scale_index * self.per_scale() + k]
    }

    pub fn tgreed_all(&self, scale_index: usize) -> &[f64] {
        let start = scale_index * self.per_scale() + 1;
        &self.values[start..start + self.config.bands()]
    }

    /// Column names in feature order, e.g. `s4_sgreed`, `s4_tgreed1`.
    pub fn names(config: &GreedConfig) -> Vec<String> {
        config
            .scales
            .iter()
            .flat_map(|s| {
                std::iter::once(format!("s{s}_sgreed")).chain((1..=config.bands()).map(move |k| format!("s{s}_tgreed{k}")))
            })
            .collect()
    }
}

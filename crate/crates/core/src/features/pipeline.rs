//! The full feature extraction flow: pseudo-reference, per-scale spatial
//! index, per-band temporal index, temporal mean pooling.

use crate::bandpass::{build_packet_filters, spatial_ms_frames, temporal::temporal_filter_frames};
use crate::video_io::{pseudo_reference_indices, LumaVideo, MultiScale, Plane, RateRatio, VideoError};

use super::{
    average_reference_entropies, block_entropies, sgreed_frame, tgreed_frame, FeatureError, GreedConfig, GreedFeatures,
    SpatialReference,
};

/// Pooled and per-frame indices at one spatial scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFeatures {
    pub scale: u32,
    pub sgreed: f64,
    pub tgreed: Vec<f64>,
    pub sgreed_per_frame: Vec<f64>,
    pub tgreed_per_frame: Vec<Vec<f64>>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Per-frame SGREED from mean-subtracted reference and distorted frames.
/// Reference entropies are averaged over cells of `ratio` frames; pass
/// [`RateRatio::ONE`] when the reference is already at the distorted rate.
pub fn sgreed_series(
    ms_ref: &[Plane],
    ms_dist: &[Plane],
    ratio: RateRatio,
    noise_var: f64,
    patch: usize,
    frames: usize,
) -> Result<Vec<f64>, FeatureError> {
    let theta_ref = average_reference_entropies(&block_entropies(ms_ref, noise_var, patch)?, ratio)?;
    let theta_dist = block_entropies(&ms_dist[..frames.min(ms_dist.len())], noise_var, patch)?;
    (0..frames).map(|t| sgreed_frame(&theta_ref.values[t], &theta_dist.values[t])).collect()
}

/// Per-frame TGREED from band-pass coefficients of reference,
/// pseudo-reference and distorted video. Pass `None` for the
/// pseudo-reference when it is the reference itself.
pub fn tgreed_series(
    band_ref: &[Plane],
    band_pr: Option<&[Plane]>,
    band_dist: &[Plane],
    ratio: RateRatio,
    noise_var: f64,
    patch: usize,
    frames: usize,
) -> Result<Vec<f64>, FeatureError> {
    let eps_ref = block_entropies(band_ref, noise_var, patch)?;
    let eps_pr = match band_pr {
        Some(pr) => block_entropies(&pr[..frames.min(pr.len())], noise_var, patch)?,
        None => eps_ref.clone(),
    };
    let eps_ref_avg = average_reference_entropies(&eps_ref, ratio)?;
    let eps_dist = block_entropies(&band_dist[..frames.min(band_dist.len())], noise_var, patch)?;
    (0..frames)
        .map(|t| tgreed_frame(&eps_ref_avg.values[t], &eps_pr.values[t], &eps_dist.values[t]))
        .collect()
}

fn check_length(which: &'static str, video: &LumaVideo, taps: usize, scale: u32) -> Result<(), FeatureError> {
    let frames = video.len();
    if frames < 2 || taps > 4 * frames {
        return Err(FeatureError::TooShort { which, frames, taps, scale });
    }
    Ok(())
}

/// GREED features for a reference/distorted pair already decomposed into
/// the configured spatial scales.
pub fn compute_features_multiscale(
    reference: &MultiScale,
    dist: &MultiScale,
    config: &GreedConfig,
) -> Result<(GreedFeatures, Vec<ScaleFeatures>), FeatureError> {
    config.validate()?;
    if reference.scales() != config.scales.as_slice() || dist.scales() != config.scales.as_slice() {
        return Err(FeatureError::InvalidConfig("pyramid scales differ from the configuration".into()));
    }
    let (rw, rh) = reference.source_dims();
    let (dw, dh) = dist.source_dims();
    if (rw, rh) != (dw, dh) {
        return Err(FeatureError::ResolutionMismatch { ref_w: rw, ref_h: rh, dist_w: dw, dist_h: dh });
    }
    if dist.fps() > reference.fps() {
        return Err(VideoError::FrameRateAbove { dist: dist.fps(), reference: reference.fps() }.into());
    }
    let ratio = reference.fps().ratio_to(&dist.fps());
    let pr_owned;
    let pseudo_ref = if ratio.is_one() {
        None
    } else {
        let kept = pseudo_reference_indices(reference.len(), ratio);
        pr_owned = reference.select(&kept, dist.fps())?;
        Some(&pr_owned)
    };
    let pr_len = pseudo_ref.map_or(reference.len(), |p| p.len());
    let frames = dist.len().min(pr_len);

    let bank = build_packet_filters(config.wavelet, config.levels)?;
    let taps = bank.max_len();
    for (i, &scale) in config.scales.iter().enumerate() {
        check_length("reference", reference.at(i), taps, scale)?;
        check_length("distorted", dist.at(i), taps, scale)?;
        if let Some(pr) = pseudo_ref {
            check_length("pseudo-reference", pr.at(i), taps, scale)?;
        }
        let v = reference.at(i);
        if v.width() < config.patch || v.height() < config.patch {
            return Err(FeatureError::NoPatches { width: v.width(), height: v.height(), patch: config.patch });
        }
    }

    // one task per (scale, index) where index 0 is spatial and 1..=K temporal
    let per_scale = 1 + bank.len();
    let tasks = config.scales.len() * per_scale;
    let series = crate::par::map_range(tasks, |task| -> Result<Vec<f64>, FeatureError> {
        let (s, k) = (task / per_scale, task % per_scale);
        let (r, d) = (reference.at(s), dist.at(s));
        if k == 0 {
            let ms_dist = spatial_ms_frames(&d.frames()[..frames]);
            match (config.spatial_reference, pseudo_ref) {
                (SpatialReference::Pseudo, Some(pr)) => {
                    let ms_pr = spatial_ms_frames(&pr.at(s).frames()[..frames]);
                    sgreed_series(&ms_pr, &ms_dist, RateRatio::ONE, config.noise_var, config.patch, frames)
                }
                _ => {
                    let ms_ref = spatial_ms_frames(r.frames());
                    sgreed_series(&ms_ref, &ms_dist, ratio, config.noise_var, config.patch, frames)
                }
            }
        } else {
            let h = &bank.filters[k - 1];
            let band_ref = temporal_filter_frames(r.frames(), h)?.coeffs;
            let band_pr = match pseudo_ref {
                Some(pr) => Some(temporal_filter_frames(pr.at(s).frames(), h)?.coeffs),
                None => None,
            };
            let band_dist = temporal_filter_frames(d.frames(), h)?.coeffs;
            tgreed_series(&band_ref, band_pr.as_deref(), &band_dist, ratio, config.noise_var, config.patch, frames)
        }
    });
    let series = series.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut values = Vec::with_capacity(config.feature_len());
    let mut details = Vec::with_capacity(config.scales.len());
    for (s, chunk) in series.chunks(per_scale).enumerate() {
        let sgreed = mean(&chunk[0]);
        let tgreed: Vec<f64> = chunk[1..].iter().map(|v| mean(v)).collect();
        values.push(sgreed);
        values.extend_from_slice(&tgreed);
        details.push(ScaleFeatures {
            scale: config.scales[s],
            sgreed,
            tgreed,
            sgreed_per_frame: chunk[0].clone(),
            tgreed_per_frame: chunk[1..].to_vec(),
        });
    }
    Ok((GreedFeatures { values, config: config.clone() }, details))
}

/// GREED features of `dist` against `reference`.
///
/// The reference may have a higher frame rate than the distorted video; it
/// must share its spatial resolution.
pub fn compute_features(reference: &LumaVideo, dist: &LumaVideo, config: &GreedConfig) -> Result<GreedFeatures, FeatureError> {
    config.validate()?;
    if (reference.width(), reference.height()) != (dist.width(), dist.height()) {
        return Err(FeatureError::ResolutionMismatch {
            ref_w: reference.width(),
            ref_h: reference.height(),
            dist_w: dist.width(),
            dist_h: dist.height(),
        });
    }
    let r = MultiScale::from_video(reference, &config.scales)?;
    let d = MultiScale::from_video(dist, &config.scales)?;
    Ok(compute_features_multiscale(&r, &d, config)?.0)
}

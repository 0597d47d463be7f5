use super::{FrameRate, LumaVideo, RateRatio, VideoError};

/// The reference temporally subsampled to the distorted frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoReference {
    pub video: LumaVideo,
    pub kept_indices: Vec<usize>,
}

/// Source indices kept when dropping frames from `ref_len` frames by the
/// rate ratio `ratio = fps_ref / fps_dist`: output frame `i` comes from
/// `floor(i * ratio)`, anchored at frame 0.
pub fn pseudo_reference_indices(ref_len: usize, ratio: RateRatio) -> Vec<usize> {
    (0..ratio.count_below(ref_len)).map(|i| ratio.floor_mul(i)).collect()
}

pub fn make_pseudo_reference(reference: &LumaVideo, dist_fps: FrameRate) -> Result<PseudoReference, VideoError> {
    if dist_fps > reference.fps() {
        return Err(VideoError::FrameRateAbove { dist: dist_fps, reference: reference.fps() });
    }
    let ratio = reference.fps().ratio_to(&dist_fps);
    if ratio.is_one() {
        return Ok(PseudoReference {
            video: reference.clone(),
            kept_indices: (0..reference.len()).collect(),
        });
    }
    let kept_indices = pseudo_reference_indices(reference.len(), ratio);
    let video = reference.select(&kept_indices, dist_fps)?;
    Ok(PseudoReference { video, kept_indices })
}

use super::FeatureError;

/// Temporal entropic difference of one frame:
/// `mean_p | (1 + |eD - ePR|) * (eR + 1) / (ePR + 1) - 1 |`.
///
/// The ratio term only departs from 1 when reference and pseudo-reference
/// differ, i.e. when the frame rates differ.
pub fn tgreed_frame(eps_ref_avg: &[f64], eps_pr: &[f64], eps_dist: &[f64]) -> Result<f64, FeatureError> {
    let p = eps_ref_avg.len();
    if eps_pr.len() != p || eps_dist.len() != p {
        return Err(FeatureError::LengthMismatch { expected: p, got: eps_pr.len().max(eps_dist.len()) });
    }
    if p == 0 {
        return Err(FeatureError::LengthMismatch { expected: 1, got: 0 });
    }
    let sum: f64 = eps_ref_avg
        .iter()
        .zip(eps_pr)
        .zip(eps_dist)
        .map(|((&r, &pr), &d)| ((1.0 + (d - pr).abs()) * ((r + 1.0) / (pr + 1.0)) - 1.0).abs())
        .sum();
    Ok(sum / p as f64)
}

/// Spatial entropic difference of one frame: `mean_p |thD - thR|`.
pub fn sgreed_frame(theta_ref: &[f64], theta_dist: &[f64]) -> Result<f64, FeatureError> {
    if theta_ref.len() != theta_dist.len() {
        return Err(FeatureError::LengthMismatch { expected: theta_ref.len(), got: theta_dist.len() });
    }
    if theta_ref.is_empty() {
        return Err(FeatureError::LengthMismatch { expected: 1, got: 0 });
    }
    let sum: f64 = theta_ref.iter().zip(theta_dist).map(|(r, d)| (d - r).abs()).sum();
    Ok(sum / theta_ref.len() as f64)
}

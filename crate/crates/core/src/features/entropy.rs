use crate::ggd::{beta_from_kurtosis, noisy_moments, sample_moments, EntropyKernel};
use crate::video_io::{Plane, RateRatio};

use super::FeatureError;

/// Per-frame, per-patch scaled entropies of one subband (or of the spatial
/// mean-subtracted coefficients) of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyField {
    /// `values[t][p]`, patches in row-major grid order.
    pub values: Vec<Vec<f64>>,
    pub rows: usize,
    pub cols: usize,
    /// Shape parameter estimated once per frame and shared by its patches.
    pub frame_betas: Vec<f64>,
}

impl EntropyField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn patches(&self) -> usize {
        self.rows * self.cols
    }

    pub fn truncate(&mut self, frames: usize) {
        self.values.truncate(frames);
        self.frame_betas.truncate(frames);
    }
}

/// Biased variance of one `patch x patch` block with top-left `(x0, y0)`.
fn patch_variance(frame: &Plane, x0: usize, y0: usize, patch: usize) -> f64 {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for y in y0..y0 + patch {
        for &v in &frame.row(y)[x0..x0 + patch] {
            sum += v;
        }
    }
    let n = (patch * patch) as f64;
    let mean = sum / n;
    for y in y0..y0 + patch {
        for &v in &frame.row(y)[x0..x0 + patch] {
            let d = v - mean;
            sum_sq += d * d;
        }
    }
    sum_sq / n
}

fn frame_entropies(frame: &Plane, noise_var: f64, patch: usize) -> Result<(Vec<f64>, f64), FeatureError> {
    let (var, kurt) = sample_moments(&frame.data);
    let noisy = noisy_moments(var, kurt, noise_var)?;
    let beta = beta_from_kurtosis(noisy.kurtosis)?;
    let kernel = EntropyKernel::new(beta);
    let (rows, cols) = (frame.height / patch, frame.width / patch);
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let variance = patch_variance(frame, c * patch, r * patch, patch) + noise_var;
            let scaling = variance.ln_1p();
            out.push(scaling * kernel.entropy_from_variance(variance));
        }
    }
    Ok((out, beta))
}

/// Scaled entropies `ln(1 + s^2) * h` of every non-overlapping patch.
///
/// The GGD shape of each frame comes from the whole-frame kurtosis after the
/// neural-noise adjustment; the scale comes from each patch's noisy variance.
/// Trailing partial patches are discarded.
pub fn block_entropies(frames: &[Plane], noise_var: f64, patch: usize) -> Result<EntropyField, FeatureError> {
    let first = frames.first().ok_or(FeatureError::NoFrames)?;
    if patch == 0 || first.width < patch || first.height < patch {
        return Err(FeatureError::NoPatches { width: first.width, height: first.height, patch });
    }
    let (rows, cols) = (first.height / patch, first.width / patch);
    let per_frame = crate::par::map_slice(frames, |f| frame_entropies(f, noise_var, patch));
    let mut values = Vec::with_capacity(frames.len());
    let mut frame_betas = Vec::with_capacity(frames.len());
    for r in per_frame {
        let (v, b) = r?;
        values.push(v);
        frame_betas.push(b);
    }
    Ok(EntropyField { values, rows, cols, frame_betas })
}

/// Boundaries `[floor(i F), floor((i + 1) F))` of the averaging cells for a
/// reference of `ref_len` frames, clipped to the reference length.
pub fn averaging_cells(ref_len: usize, ratio: RateRatio) -> Vec<std::ops::Range<usize>> {
    (0..ratio.count_below(ref_len))
        .map(|i| ratio.floor_mul(i)..ratio.floor_mul(i + 1).min(ref_len))
        .collect()
}

/// Brings reference entropies to the distorted frame rate by averaging each
/// cell of consecutive reference frames, patch by patch.
pub fn average_reference_entropies(field: &EntropyField, ratio: RateRatio) -> Result<EntropyField, FeatureError> {
    if !ratio.at_least_one() {
        return Err(FeatureError::RateBelowOne);
    }
    if ratio.is_one() {
        return Ok(field.clone());
    }
    let cells = averaging_cells(field.len(), ratio);
    let mut values = Vec::with_capacity(cells.len());
    let mut frame_betas = Vec::with_capacity(cells.len());
    for cell in cells {
        if cell.is_empty() {
            return Err(FeatureError::EmptyCell(cell.start));
        }
        let n = cell.len() as f64;
        let mut avg = vec![0.0; field.patches()];
        for t in cell.clone() {
            for (a, &v) in avg.iter_mut().zip(&field.values[t]) {
                *a += v;
            }
        }
        avg.iter_mut().for_each(|a| *a /= n);
        values.push(avg);
        frame_betas.push(field.frame_betas[cell].iter().sum::<f64>() / n);
    }
    Ok(EntropyField { values, rows: field.rows, cols: field.cols, frame_betas })
}

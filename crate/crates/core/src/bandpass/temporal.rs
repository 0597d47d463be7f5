use crate::video_io::{LumaVideo, Plane};

use super::BandpassError;

/// Band-pass coefficients of one subband, one plane per input frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandStack {
    pub subband_index: usize,
    pub coeffs: Vec<Plane>,
}

impl SubbandStack {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.coeffs.iter().flat_map(|p| p.data.iter().copied())
    }
}

/// Half-sample symmetric extension: `... x1 x0 | x0 x1 ... x(n-1) | x(n-1) ...`,
/// periodic with period `2n` so any offset is valid.
#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

/// Convolves every pixel's time series with `taps`, without decimation.
///
/// Output frame `t` is `sum_j taps[j] * x[t + L/2 - j]` (integer `L/2`),
/// which centres the filter support on frame `t`. For the Haar high-pass
/// `[1, -1]/sqrt(2)` this is `(x[t+1] - x[t]) / sqrt(2)`.
pub fn temporal_filter(video: &LumaVideo, taps: &[f64]) -> Result<SubbandStack, BandpassError> {
    temporal_filter_frames(video.frames(), taps)
}

pub(crate) fn temporal_filter_frames(frames: &[Plane], taps: &[f64]) -> Result<SubbandStack, BandpassError> {
    let n = frames.len();
    if n < 2 {
        return Err(BandpassError::TooFewFrames(n));
    }
    if taps.len() > 4 * n {
        return Err(BandpassError::SignalTooShort { taps: taps.len(), frames: n });
    }
    let (width, height) = (frames[0].width, frames[0].height);
    let shift = (taps.len() / 2) as isize;
    let coeffs = crate::par::map_range(n, |t| {
        let mut out = vec![0.0; width * height];
        for (j, &h) in taps.iter().enumerate() {
            if h == 0.0 {
                continue;
            }
            let src = &frames[mirror_index(t as isize + shift - j as isize, n)].data;
            for (o, &x) in out.iter_mut().zip(src) {
                *o += h * x;
            }
        }
        Plane { width, height, data: out }
    });
    Ok(SubbandStack { subband_index: 0, coeffs })
}

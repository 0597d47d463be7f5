//! Luma video containers, decoding, spatial downsampling and the
//! pseudo-reference built by frame dropping.
//!
//! Only the luma plane is kept. Samples are stored as `f64` in the 8-bit
//! range `[0, 255]`; higher bit depths are rescaled on load so that the
//! neural-noise constants downstream keep their calibration.

mod pseudo;
mod pyramid;
mod raw;
mod y4m;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

pub use pseudo::{make_pseudo_reference, pseudo_reference_indices, PseudoReference};
pub use pyramid::{downsample, downsample_plane, MultiScale};
pub use raw::{load_raw_yuv, PixelFormat, RawYuvReader};
pub use y4m::{load_y4m, write_y4m, Chroma, Y4mHeader, Y4mReader};

#[derive(Debug, Error)]
pub enum VideoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a Y4M stream (byte 0)")]
    NotY4m,
    #[error("malformed Y4M at byte {offset}: {reason}")]
    Malformed { offset: u64, reason: String },
    #[error("unsupported chroma tag '{tag}' at byte {offset}")]
    UnsupportedChroma { offset: u64, tag: String },
    #[error("truncated frame payload at byte {offset}: expected {expected} bytes, got {got}")]
    TruncatedFrame { offset: u64, expected: usize, got: usize },
    #[error("truncated: expected {expected} bytes, got {got}")]
    SizeMismatch { expected: u64, got: u64 },
    #[error("zero frame dimensions")]
    ZeroDimensions,
    #[error("video contains no frames")]
    Empty,
    #[error("frame {index} is {got_w}x{got_h}, expected {width}x{height}")]
    FrameSize {
        index: usize,
        width: usize,
        height: usize,
        got_w: usize,
        got_h: usize,
    },
    #[error("downsampling {width}x{height} by 2^{scale} leaves an empty frame")]
    TooSmall { width: usize, height: usize, scale: u32 },
    #[error("invalid frame rate '{0}'")]
    InvalidFrameRate(String),
    #[error("distorted frame rate {dist} exceeds reference frame rate {reference}")]
    FrameRateAbove { dist: FrameRate, reference: FrameRate },
}

/// A frame rate as a reduced positive fraction, e.g. `30000/1001`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameRate {
    num: u64,
    den: u64,
}

impl FrameRate {
    pub fn new(num: u64, den: u64) -> Result<Self, VideoError> {
        if num == 0 || den == 0 {
            return Err(VideoError::InvalidFrameRate(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(FrameRate { num: num / g, den: den / g })
    }

    pub fn integer(fps: u64) -> Result<Self, VideoError> {
        Self::new(fps, 1)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self / other` as a reduced fraction `(num, den)`.
    pub fn ratio_to(&self, other: &FrameRate) -> RateRatio {
        let n = self.num as u128 * other.den as u128;
        let d = self.den as u128 * other.num as u128;
        let g = n.gcd(&d);
        RateRatio { num: n / g, den: d / g }
    }
}

impl PartialOrd for FrameRate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FrameRate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for FrameRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for FrameRate {
    type Err = VideoError;

    /// Accepts `120`, `30000/1001` or `30000:1001`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VideoError::InvalidFrameRate(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once(['/', ':']) {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        FrameRate::new(n, d).map_err(|_| bad())
    }
}

/// Ratio of two frame rates (`F = fps_ref / fps_dist`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateRatio {
    num: u128,
    den: u128,
}

impl RateRatio {
    pub const ONE: RateRatio = RateRatio { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "rate ratio must be positive");
        let (n, d) = (num as u128, den as u128);
        let g = n.gcd(&d);
        RateRatio { num: n / g, den: d / g }
    }

    /// `floor(i * F)`
    pub fn floor_mul(&self, i: usize) -> usize {
        (i as u128 * self.num / self.den) as usize
    }

    /// Number of indices `i` with `floor(i * F) < n`, i.e. `ceil(n / F)`.
    pub fn count_below(&self, n: usize) -> usize {
        (n as u128 * self.den).div_ceil(self.num) as usize
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn at_least_one(&self) -> bool {
        self.num >= self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A single luma plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane data does not match {width}x{height}");
        Plane { width, height, data }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Plane { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Plane { width, height, data }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// A sequence of equally sized luma frames with a nominal frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaVideo {
    frames: Vec<Plane>,
    width: usize,
    height: usize,
    fps: FrameRate,
}

impl LumaVideo {
    pub fn new(frames: Vec<Plane>, fps: FrameRate) -> Result<Self, VideoError> {
        let first = frames.first().ok_or(VideoError::Empty)?;
        let (width, height) = (first.width, first.height);
        if width == 0 || height == 0 {
            return Err(VideoError::ZeroDimensions);
        }
        for (index, f) in frames.iter().enumerate() {
            if f.width != width || f.height != height {
                return Err(VideoError::FrameSize {
                    index,
                    width,
                    height,
                    got_w: f.width,
                    got_h: f.height,
                });
            }
        }
        Ok(LumaVideo { frames, width, height, fps })
    }

    pub fn frames(&self) -> &[Plane] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Plane> {
        self.frames
    }

    pub fn frame(&self, t: usize) -> &Plane {
        &self.frames[t]
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    /// New video made of the frames at `indices`, with a new nominal rate.
    pub fn select(&self, indices: &[usize], fps: FrameRate) -> Result<Self, VideoError> {
        LumaVideo::new(indices.iter().map(|&i| self.frames[i].clone()).collect(), fps)
    }
}

//! Headerless planar YUV with caller-supplied geometry.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use super::y4m::decode_luma;
use super::{FrameRate, LumaVideo, Plane, VideoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PixelFormat {
    #[default]
    Yuv420p,
    Yuv420p10le,
}

impl PixelFormat {
    fn bit_depth(self) -> u8 {
        match self {
            PixelFormat::Yuv420p => 8,
            PixelFormat::Yuv420p10le => 10,
        }
    }

    pub fn frame_bytes(self, width: usize, height: usize) -> usize {
        let samples = width * height + 2 * width.div_ceil(2) * height.div_ceil(2);
        samples * if self.bit_depth() > 8 { 2 } else { 1 }
    }

    fn luma_bytes(self, width: usize, height: usize) -> usize {
        width * height * if self.bit_depth() > 8 { 2 } else { 1 }
    }
}

impl FromStr for PixelFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yuv420p" | "420" | "420p" => Ok(PixelFormat::Yuv420p),
            "yuv420p10le" | "420p10" => Ok(PixelFormat::Yuv420p10le),
            other => Err(format!("unsupported pixel format '{other}'")),
        }
    }
}

/// Streaming reader over a raw planar file. Frame boundaries are purely
/// positional, so a short final frame is reported as a size mismatch.
pub struct RawYuvReader<R> {
    inner: R,
    width: usize,
    height: usize,
    fps: FrameRate,
    format: PixelFormat,
    buf: Vec<u8>,
    consumed: u64,
}

impl<R: Read> RawYuvReader<R> {
    pub fn new(inner: R, width: usize, height: usize, fps: FrameRate, format: PixelFormat) -> Result<Self, VideoError> {
        if width == 0 || height == 0 {
            return Err(VideoError::ZeroDimensions);
        }
        Ok(RawYuvReader { inner, width, height, fps, format, buf: Vec::new(), consumed: 0 })
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    pub fn next_frame(&mut self) -> Option<Result<Plane, VideoError>> {
        let expected = self.format.frame_bytes(self.width, self.height);
        self.buf.resize(expected, 0);
        let mut got = 0;
        while got < expected {
            match self.inner.read(&mut self.buf[got..]) {
                Ok(0) => break,
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => {
                    return Some(Err(VideoError::Malformed { offset: self.consumed + got as u64, reason: e.to_string() }))
                }
            }
        }
        if got == 0 {
            return None;
        }
        if got < expected {
            return Some(Err(VideoError::SizeMismatch {
                expected: self.consumed + expected as u64,
                got: self.consumed + got as u64,
            }));
        }
        self.consumed += expected as u64;
        let luma = &self.buf[..self.format.luma_bytes(self.width, self.height)];
        Some(Ok(decode_luma(luma, self.width, self.height, self.format.bit_depth())))
    }
}

impl<R: Read> Iterator for RawYuvReader<R> {
    type Item = Result<Plane, VideoError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame()
    }
}

pub fn load_raw_yuv(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    fps: FrameRate,
    format: PixelFormat,
) -> Result<LumaVideo, VideoError> {
    let path = path.as_ref();
    if width == 0 || height == 0 {
        return Err(VideoError::ZeroDimensions);
    }
    let io_err = |source| VideoError::Io { path: path.to_path_buf(), source };
    let file = File::open(path).map_err(io_err)?;
    let size = file.metadata().map_err(io_err)?.len();
    let frame = format.frame_bytes(width, height) as u64;
    if size == 0 {
        return Err(VideoError::Empty);
    }
    if size % frame != 0 {
        return Err(VideoError::SizeMismatch { expected: size.div_ceil(frame) * frame, got: size });
    }
    let reader = RawYuvReader::new(BufReader::new(file), width, height, fps, format)?;
    let frames = reader.collect::<Result<Vec<_>, _>>()?;
    LumaVideo::new(frames, fps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn fps() -> FrameRate {
        FrameRate::integer(30).unwrap()
    }

    #[test]
    fn two_frames_of_16x8() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(&vec![7u8; 2 * (128 + 64)]).unwrap();
        let v = load_raw_yuv(f.path(), 16, 8, fps(), PixelFormat::Yuv420p).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.frame(1).mean(), 7.0);
    }

    #[test]
    fn one_byte_short() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(&vec![0u8; 383]).unwrap();
        let err = load_raw_yuv(f.path(), 16, 8, fps(), PixelFormat::Yuv420p).unwrap_err();
        assert_eq!(err.to_string(), "truncated: expected 384 bytes, got 383");
    }

    #[test]
    fn zero_dimensions() {
        let f = tempfile::NamedTempFile::new().unwrap();
        let err = load_raw_yuv(f.path(), 0, 8, fps(), PixelFormat::Yuv420p).unwrap_err();
        assert!(matches!(err, VideoError::ZeroDimensions));
    }

    #[test]
    fn pixel_format_names() {
        assert_eq!("yuv420p".parse::<PixelFormat>().unwrap(), PixelFormat::Yuv420p);
        assert_eq!(PixelFormat::Yuv420p10le.frame_bytes(16, 8), 384);
        assert!("nv12".parse::<PixelFormat>().is_err());
    }
}

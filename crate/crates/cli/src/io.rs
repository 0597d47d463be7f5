//! Video loading and the text formats shared between subcommands.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use greed_core::video_io::{FrameRate, MultiScale, PixelFormat, RawYuvReader, VideoError, Y4mReader};

/// Raised when an artifact was produced under a different feature
/// configuration. Maps to exit code 3.
#[derive(Debug)]
pub struct FingerprintMismatch {
    pub what: String,
    pub found: String,
    pub expected: String,
}

impl fmt::Display for FingerprintMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} has config fingerprint {}, current configuration is {}", self.what, self.found, self.expected)
    }
}

impl std::error::Error for FingerprintMismatch {}

/// Geometry for headerless inputs. Ignored for Y4M files.
#[derive(Debug, Clone, Copy)]
pub struct RawGeometry {
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub format: PixelFormat,
}

fn video_error(path: &Path, e: VideoError) -> anyhow::Error {
    match e {
        // already carries the path
        VideoError::Io { .. } => e.into(),
        other => anyhow::Error::new(other).context(path.display().to_string()),
    }
}

fn is_y4m(path: &Path) -> Result<bool> {
    let mut magic = [0u8; 9];
    let mut f = File::open(path).with_context(|| path.display().to_string())?;
    let mut got = 0;
    while got < magic.len() {
        match f.read(&mut magic[got..]).with_context(|| path.display().to_string())? {
            0 => break,
            n => got += n,
        }
    }
    Ok(got == magic.len() && &magic == b"YUV4MPEG2")
}

/// Decodes `path` straight into the spatial pyramid without keeping the
/// full-resolution frames. Y4M is detected by its signature; anything else
/// is read as raw planar YUV and needs `geometry` plus `raw_fps`.
pub fn load_pyramid(path: &Path, scales: &[u32], geometry: RawGeometry, raw_fps: Option<FrameRate>) -> Result<MultiScale> {
    if is_y4m(path)? {
        let reader = Y4mReader::open(path).map_err(|e| video_error(path, e))?;
        let fps = reader.header().fps;
        return MultiScale::from_frames(reader, fps, scales).map_err(|e| video_error(path, e));
    }
    let (Some(width), Some(height), Some(fps)) = (geometry.width, geometry.height, raw_fps) else {
        bail!("{}: not a Y4M file; raw input needs --width, --height and a frame rate", path.display());
    };
    let file = File::open(path).with_context(|| path.display().to_string())?;
    let reader = RawYuvReader::new(BufReader::new(file), width, height, fps, geometry.format).map_err(|e| video_error(path, e))?;
    MultiScale::from_frames(reader, fps, scales).map_err(|e| video_error(path, e))
}

/// A feature vector as printed by `greed features` for a single pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedFeatures {
    pub fingerprint: String,
    pub values: Vec<f64>,
}

pub fn format_text(fingerprint: &str, names: &[String], values: &[f64]) -> String {
    let mut out = format!("fingerprint {fingerprint}\n");
    for (name, v) in names.iter().zip(values) {
        out.push_str(&format!("{name} {v}\n"));
    }
    out
}

pub fn format_csv(fingerprint: &str, names: &[String], values: &[f64]) -> String {
    let header: Vec<&str> = std::iter::once("fingerprint").chain(names.iter().map(String::as_str)).collect();
    let row: Vec<String> = std::iter::once(fingerprint.to_string()).chain(values.iter().map(f64::to_string)).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

/// Parses either output format of `greed features`.
pub fn parse_printed(text: &str) -> Result<PrintedFeatures> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = lines.next().ok_or_else(|| anyhow!("feature input is empty"))?;
    let number = |s: &str, line: usize| -> Result<f64> { s.parse().map_err(|_| anyhow!("feature input line {line}: '{s}' is not a number")) };
    if first.starts_with("fingerprint,") {
        let row = lines.next().ok_or_else(|| anyhow!("feature input line 2: missing CSV row"))?;
        let mut fields = row.split(',').map(str::trim);
        let fingerprint = fields.next().unwrap_or_default().to_string();
        let values = fields.map(|f| number(f, 2)).collect::<Result<Vec<_>>>()?;
        return Ok(PrintedFeatures { fingerprint, values });
    }
    let fingerprint = match first.split_once(char::is_whitespace) {
        Some(("fingerprint", fp)) => fp.trim().to_string(),
        _ => bail!("feature input line 1: expected 'fingerprint <id>'"),
    };
    let values = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("fingerprint"))
        .map(|(i, l)| {
            let v = l.rsplit(char::is_whitespace).next().unwrap_or_default();
            number(v, i + 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PrintedFeatures { fingerprint, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_formats_round_trip() {
        let names = vec!["a".to_string(), "b".to_string()];
        let values = [0.1 + 0.2, -1e-300];
        for text in [format_text("abc", &names, &values), format_csv("abc", &names, &values)] {
            let p = parse_printed(&text).unwrap();
            assert_eq!(p.fingerprint, "abc");
            assert_eq!(p.values, values);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_printed("").is_err());
        assert!(parse_printed("hello world\n").is_err());
        assert!(parse_printed("fingerprint x\na nope\n").is_err());
    }
}

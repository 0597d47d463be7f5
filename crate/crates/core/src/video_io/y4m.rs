//! YUV4MPEG2 reading and writing (luma only on read).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{FrameRate, LumaVideo, Plane, VideoError};

const MAGIC: &[u8] = b"YUV4MPEG2";
const MAX_HEADER: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chroma {
    Mono,
    C420,
    C422,
    C444,
}

impl Chroma {
    /// Bytes-per-sample independent count of chroma samples per frame.
    fn chroma_samples(self, width: usize, height: usize) -> usize {
        match self {
            Chroma::Mono => 0,
            Chroma::C420 => 2 * width.div_ceil(2) * height.div_ceil(2),
            Chroma::C422 => 2 * width.div_ceil(2) * height,
            Chroma::C444 => 2 * width * height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Y4mHeader {
    pub width: usize,
    pub height: usize,
    pub fps: FrameRate,
    pub chroma: Chroma,
    pub bit_depth: u8,
}

impl Y4mHeader {
    fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn luma_bytes(&self) -> usize {
        self.width * self.height * self.bytes_per_sample()
    }

    pub fn frame_bytes(&self) -> usize {
        (self.width * self.height + self.chroma.chroma_samples(self.width, self.height))
            * self.bytes_per_sample()
    }
}

fn parse_chroma(tag: &str, offset: u64) -> Result<(Chroma, u8), VideoError> {
    let parsed = match tag {
        "420" | "420jpeg" | "420paldv" | "420mpeg2" => (Chroma::C420, 8),
        "420p10" => (Chroma::C420, 10),
        "422" => (Chroma::C422, 8),
        "422p10" => (Chroma::C422, 10),
        "444" => (Chroma::C444, 8),
        "444p10" => (Chroma::C444, 10),
        "mono" => (Chroma::Mono, 8),
        "mono10" => (Chroma::Mono, 10),
        _ => {
            return Err(VideoError::UnsupportedChroma { offset, tag: tag.to_string() });
        }
    };
    Ok(parsed)
}

/// Reads one `\n`-terminated line. Returns `Ok(None)` on clean EOF.
fn read_line<R: BufRead>(r: &mut R, offset: u64) -> Result<Option<Vec<u8>>, VideoError> {
    let mut line = Vec::new();
    let n = r
        .by_ref()
        .take(MAX_HEADER as u64 + 1)
        .read_until(b'\n', &mut line)
        .map_err(|e| VideoError::Malformed { offset, reason: e.to_string() })?;
    if n == 0 {
        return Ok(None);
    }
    if line.last() != Some(&b'\n') {
        let reason = if n > MAX_HEADER { "header line too long" } else { "unterminated header line" };
        return Err(VideoError::Malformed { offset: offset + n as u64, reason: reason.into() });
    }
    line.pop();
    Ok(Some(line))
}

fn parse_header(line: &[u8]) -> Result<Y4mHeader, VideoError> {
    if !line.starts_with(MAGIC) {
        return Err(VideoError::NotY4m);
    }
    let text = std::str::from_utf8(line)
        .map_err(|_| VideoError::Malformed { offset: 0, reason: "header is not ASCII".into() })?;
    let mut width = None;
    let mut height = None;
    let mut fps = None;
    let mut chroma = (Chroma::C420, 8u8);
    let mut pos = MAGIC.len();
    for token in text[MAGIC.len()..].split(' ') {
        let offset = pos as u64;
        pos += token.len() + 1;
        if token.is_empty() {
            continue;
        }
        let (key, value) = token.split_at(1);
        let bad = |what: &str| VideoError::Malformed { offset, reason: format!("bad {what} '{token}'") };
        match key {
            "W" => width = Some(value.parse::<usize>().map_err(|_| bad("width"))?),
            "H" => height = Some(value.parse::<usize>().map_err(|_| bad("height"))?),
            "F" => fps = Some(value.parse::<FrameRate>().map_err(|_| bad("frame rate"))?),
            "C" => chroma = parse_chroma(value, offset)?,
            // interlacing, pixel aspect and extensions do not affect luma
            "I" | "A" | "X" => {}
            _ => return Err(bad("header parameter")),
        }
    }
    let missing = |what: &str| VideoError::Malformed { offset: line.len() as u64, reason: format!("missing {what}") };
    let width = width.ok_or_else(|| missing("W"))?;
    let height = height.ok_or_else(|| missing("H"))?;
    let fps = fps.ok_or_else(|| missing("F"))?;
    if width == 0 || height == 0 {
        return Err(VideoError::ZeroDimensions);
    }
    Ok(Y4mHeader { width, height, fps, chroma: chroma.0, bit_depth: chroma.1 })
}

/// Streaming Y4M reader yielding luma planes one frame at a time.
pub struct Y4mReader<R> {
    inner: R,
    header: Y4mHeader,
    offset: u64,
    buf: Vec<u8>,
}

impl Y4mReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, VideoError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| VideoError::Io { path: path.to_path_buf(), source })?;
        Y4mReader::new(BufReader::new(file))
    }
}

impl<R: BufRead> Y4mReader<R> {
    pub fn new(mut inner: R) -> Result<Self, VideoError> {
        let line = read_line(&mut inner, 0)?.ok_or(VideoError::NotY4m)?;
        let header = parse_header(&line)?;
        let offset = line.len() as u64 + 1;
        Ok(Y4mReader { inner, header, offset, buf: Vec::new() })
    }

    pub fn header(&self) -> &Y4mHeader {
        &self.header
    }

    /// Next luma plane, or `None` at a clean end of stream.
    pub fn next_frame(&mut self) -> Option<Result<Plane, VideoError>> {
        let start = self.offset;
        let line = match read_line(&mut self.inner, start) {
            Ok(Some(line)) => line,
            Ok(None) => return None,
            Err(e) => return Some(Err(e)),
        };
        if !line.starts_with(b"FRAME") {
            return Some(Err(VideoError::Malformed { offset: start, reason: "expected FRAME marker".into() }));
        }
        self.offset += line.len() as u64 + 1;

        let expected = self.header.frame_bytes();
        self.buf.resize(expected, 0);
        let mut got = 0;
        while got < expected {
            match self.inner.read(&mut self.buf[got..]) {
                Ok(0) => break,
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => {
                    return Some(Err(VideoError::Malformed { offset: self.offset + got as u64, reason: e.to_string() }))
                }
            }
        }
        if got < expected {
            return Some(Err(VideoError::TruncatedFrame { offset: self.offset + got as u64, expected, got }));
        }
        self.offset += expected as u64;

        let h = &self.header;
        let luma = &self.buf[..h.luma_bytes()];
        Some(Ok(decode_luma(luma, h.width, h.height, h.bit_depth)))
    }
}

impl<R: BufRead> Iterator for Y4mReader<R> {
    type Item = Result<Plane, VideoError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame()
    }
}

/// Widens 8-bit samples, or rescales little-endian high-bit-depth samples to
/// the `[0, 255]` range.
pub(super) fn decode_luma(bytes: &[u8], width: usize, height: usize, bit_depth: u8) -> Plane {
    let data = if bit_depth <= 8 {
        bytes.iter().map(|&b| b as f64).collect()
    } else {
        let max = ((1u32 << bit_depth) - 1) as f64;
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as f64 * 255.0 / max)
            .collect()
    };
    Plane::new(width, height, data)
}

/// Reads every frame of a Y4M file into memory.
pub fn load_y4m(path: impl AsRef<Path>) -> Result<LumaVideo, VideoError> {
    let mut reader = Y4mReader::open(path)?;
    let fps = reader.header().fps;
    let frames = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    LumaVideo::new(frames, fps)
}

/// Writes an 8-bit 4:2:0 Y4M stream. Luma samples are rounded and clamped to
/// `[0, 255]`; chroma planes are mid-grey.
pub fn write_y4m<W: Write>(out: W, video: &LumaVideo) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let fps = video.fps();
    writeln!(out, "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 C420jpeg", video.width(), video.height(), fps.num(), fps.den())?;
    let chroma = vec![128u8; Chroma::C420.chroma_samples(video.width(), video.height())];
    let mut luma = Vec::with_capacity(video.width() * video.height());
    for frame in video.frames() {
        luma.clear();
        luma.extend(frame.data.iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
        out.write_all(b"FRAME\n")?;
        out.write_all(&luma)?;
        out.write_all(&chroma)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn stream(header: &str, frames: usize, frame_bytes: usize) -> Vec<u8> {
        let mut v = header.as_bytes().to_vec();
        v.push(b'\n');
        for i in 0..frames {
            v.extend_from_slice(b"FRAME\n");
            v.extend((0..frame_bytes).map(|k| ((k + i) % 251) as u8));
        }
        v
    }

    #[test]
    fn parses_basic_header() {
        let data = stream("YUV4MPEG2 W16 H8 F30:1 C420", 2, 16 * 8 + 2 * 8 * 4);
        let frames: Vec<_> = Y4mReader::new(Cursor::new(data)).unwrap().collect::<Result<_, _>>().unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!((frames[0].width, frames[0].height), (16, 8));
        assert_eq!(frames[1].get(0, 0), 1.0);
    }

    #[test]
    fn rejects_riff() {
        let err = Y4mReader::new(Cursor::new(b"RIFF\x00\x00\x00\x00WAVE\n".to_vec())).err().unwrap();
        assert!(matches!(err, VideoError::NotY4m));
        assert!(err.to_string().contains("not a Y4M stream"));
    }

    #[test]
    fn rejects_unknown_chroma_with_offset() {
        let err = Y4mReader::new(Cursor::new(b"YUV4MPEG2 W4 H4 F30:1 C411\n".to_vec())).err().unwrap();
        match err {
            VideoError::UnsupportedChroma { offset, tag } => {
                assert_eq!(tag, "411");
                assert_eq!(offset, 22);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let mut data = stream("YUV4MPEG2 W4 H4 F30:1 Cmono", 1, 16);
        data.truncate(data.len() - 3);
        let mut r = Y4mReader::new(Cursor::new(data)).unwrap();
        match r.next_frame().unwrap() {
            Err(VideoError::TruncatedFrame { offset, expected, got }) => {
                assert_eq!((expected, got), (16, 13));
                assert_eq!(offset, 28 + 6 + 13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ten_bit_is_rescaled() {
        let mut data = b"YUV4MPEG2 W2 H1 F60:1 Cmono10\nFRAME\n".to_vec();
        data.extend_from_slice(&1023u16.to_le_bytes());
        data.extend_from_slice(&0u16.to_le_bytes());
        let f = Y4mReader::new(Cursor::new(data)).unwrap().next_frame().unwrap().unwrap();
        assert_eq!(f.data, vec![255.0, 0.0]);
    }

    #[test]
    fn missing_frame_rate_is_an_error() {
        let err = Y4mReader::new(Cursor::new(b"YUV4MPEG2 W4 H4\n".to_vec())).err().unwrap();
        assert!(err.to_string().contains("missing F"));
    }
}

use super::{FrameRate, LumaVideo, Plane, VideoError};

/// One 2x2 average-pooling pass. Odd trailing rows/columns are dropped.
fn halve(plane: &Plane) -> Plane {
    let (w, h) = (plane.width / 2, plane.height / 2);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let top = plane.row(2 * y);
        let bottom = plane.row(2 * y + 1);
        for x in 0..w {
            let sum = top[2 * x] + top[2 * x + 1] + bottom[2 * x] + bottom[2 * x + 1];
            data.push(sum * 0.25);
        }
    }
    Plane { width: w, height: h, data }
}

/// Applies `scale` successive 2x2 average-pooling passes to one plane.
pub fn downsample_plane(plane: &Plane, scale: u32) -> Result<Plane, VideoError> {
    let w = plane.width >> scale;
    let h = plane.height >> scale;
    if w == 0 || h == 0 {
        return Err(VideoError::TooSmall { width: plane.width, height: plane.height, scale });
    }
    let mut out = plane.clone();
    for _ in 0..scale {
        out = halve(&out);
    }
    debug_assert_eq!((out.width, out.height), (w, h));
    Ok(out)
}

/// Downsamples every frame by `2^scale` along both axes; fps is unchanged.
pub fn downsample(video: &LumaVideo, scale: u32) -> Result<LumaVideo, VideoError> {
    let frames = crate::par::map_slice(video.frames(), |f| downsample_plane(f, scale));
    LumaVideo::new(frames.into_iter().collect::<Result<_, _>>()?, video.fps())
}

/// The same video at several spatial scales, built in one pass over the
/// source frames so full-resolution frames never need to be held at once.
#[derive(Debug, Clone)]
pub struct MultiScale {
    scales: Vec<u32>,
    videos: Vec<LumaVideo>,
    source_dims: (usize, usize),
}

impl MultiScale {
    pub fn from_video(video: &LumaVideo, scales: &[u32]) -> Result<Self, VideoError> {
        if scales.is_empty() {
            return Err(VideoError::Empty);
        }
        let videos = scales.iter().map(|&s| downsample(video, s)).collect::<Result<_, _>>()?;
        Ok(MultiScale { scales: scales.to_vec(), videos, source_dims: (video.width(), video.height()) })
    }

    pub fn from_frames<I>(frames: I, fps: FrameRate, scales: &[u32]) -> Result<Self, VideoError>
    where
        I: IntoIterator<Item = Result<Plane, VideoError>>,
    {
        if scales.is_empty() {
            return Err(VideoError::Empty);
        }
        let mut per_scale: Vec<Vec<Plane>> = vec![Vec::new(); scales.len()];
        let mut source_dims = None;
        // scales may be unsorted; walk them in ascending order
        let mut order: Vec<usize> = (0..scales.len()).collect();
        order.sort_by_key(|&i| scales[i]);
        for (index, frame) in frames.into_iter().enumerate() {
            let frame = frame?;
            let (width, height) = *source_dims.get_or_insert((frame.width, frame.height));
            if (frame.width, frame.height) != (width, height) {
                return Err(VideoError::FrameSize { index, width, height, got_w: frame.width, got_h: frame.height });
            }
            let mut current = frame;
            let mut level = 0u32;
            for &i in &order {
                let remaining = scales[i] - level;
                current = downsample_plane(&current, remaining)?;
                level = scales[i];
                per_scale[i].push(current.clone());
            }
        }
        let source_dims = source_dims.ok_or(VideoError::Empty)?;
        let videos = per_scale.into_iter().map(|f| LumaVideo::new(f, fps)).collect::<Result<_, _>>()?;
        Ok(MultiScale { scales: scales.to_vec(), videos, source_dims })
    }

    /// Width and height of the full-resolution source.
    pub fn source_dims(&self) -> (usize, usize) {
        self.source_dims
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    pub fn at(&self, index: usize) -> &LumaVideo {
        &self.videos[index]
    }

    pub fn videos(&self) -> &[LumaVideo] {
        &self.videos
    }

    pub fn fps(&self) -> FrameRate {
        self.videos[0].fps()
    }

    pub fn len(&self) -> usize {
        self.videos[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.videos[0].is_empty()
    }

    /// Keeps only the frames at `indices` at every scale.
    pub fn select(&self, indices: &[usize], fps: FrameRate) -> Result<Self, VideoError> {
        let videos = self.videos.iter().map(|v| v.select(indices, fps)).collect::<Result<_, _>>()?;
        Ok(MultiScale { scales: self.scales.clone(), videos, source_dims: self.source_dims })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn video(frames: Vec<Plane>) -> LumaVideo {
        LumaVideo::new(frames, FrameRate::integer(30).unwrap()).unwrap()
    }

    #[test]
    fn constant_stays_constant() {
        let v = video(vec![Plane::filled(40, 24, 7.0)]);
        for s in 0..3 {
            assert!(downsample(&v, s).unwrap().frame(0).data.iter().all(|&x| x == 7.0));
        }
    }

    #[test]
    fn two_by_two_mean() {
        let v = video(vec![Plane::new(2, 2, vec![1.0, 3.0, 5.0, 7.0])]);
        assert_eq!(downsample(&v, 1).unwrap().frame(0).data, vec![4.0]);
    }

    #[test]
    fn odd_dimensions_truncate() {
        let p = Plane::filled(37, 23, 1.0);
        let d = downsample_plane(&p, 2).unwrap();
        assert_eq!((d.width, d.height), (9, 5));
        assert!(matches!(downsample_plane(&p, 5), Err(VideoError::TooSmall { .. })));
    }

    #[test]
    fn multiscale_matches_direct() {
        let p = Plane::from_fn(64, 48, |x, y| ((x * 31 + y * 17) % 256) as f64);
        let v = video(vec![p.clone(), p]);
        let ms = MultiScale::from_frames(v.frames().iter().cloned().map(Ok), v.fps(), &[4, 2]).unwrap();
        assert_eq!(ms.at(0), &downsample(&v, 4).unwrap());
        assert_eq!(ms.at(1), &downsample(&v, 2).unwrap());
    }

    proptest! {
        #[test]
        fn composes(a in 0u32..3, b in 0u32..3, seed in any::<u64>()) {
            let p = Plane::from_fn(32, 32, |x, y| (seed.wrapping_mul(1 + x as u64 * 131 + y as u64 * 7919) % 1000) as f64 / 3.7);
            let v = video(vec![p]);
            let once = downsample(&v, a + b).unwrap();
            let twice = downsample(&downsample(&v, a).unwrap(), b).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn preserves_mean(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let p = Plane::from_fn(2 * w, 2 * h, |x, y| (seed.wrapping_mul(3 + x as u64 * 977 + y as u64 * 131) % 256) as f64 + 0.123);
            let d = downsample_plane(&p, 1).unwrap();
            prop_assert!((d.mean() - p.mean()).abs() <= 1e-9);
        }
    }
}

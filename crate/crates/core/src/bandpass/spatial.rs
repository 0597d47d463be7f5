use crate::video_io::Plane;

use super::mirror_index;

/// Half-width of the local-mean window (15x15 taps).
pub const GAUSSIAN_HALF_WIDTH: usize = 7;
/// The window reaches three standard deviations at its edge.
pub const GAUSSIAN_SIGMA: f64 = GAUSSIAN_HALF_WIDTH as f64 / 3.0;

fn gaussian_1d() -> Vec<f64> {
    let r = GAUSSIAN_HALF_WIDTH as isize;
    let w: Vec<f64> = (-r..=r)
        .map(|g| (-((g * g) as f64) / (2.0 * GAUSSIAN_SIGMA * GAUSSIAN_SIGMA)).exp())
        .collect();
    let sum: f64 = w.iter().sum();
    w.into_iter().map(|x| x / sum).collect()
}

/// The normalized 15x15 circular Gaussian, row-major.
pub fn gaussian_window() -> Vec<f64> {
    let w = gaussian_1d();
    w.iter().flat_map(|a| w.iter().map(move |b| a * b)).collect()
}

/// Frame minus its Gaussian-weighted local mean (mirror boundaries).
///
/// The circular Gaussian is separable, so the local mean is computed with a
/// horizontal then a vertical 15-tap pass.
pub fn spatial_ms(frame: &Plane) -> Plane {
    let w = gaussian_1d();
    let r = GAUSSIAN_HALF_WIDTH as isize;
    let (width, height) = (frame.width, frame.height);

    let mut horizontal = vec![0.0; width * height];
    for y in 0..height {
        let row = frame.row(y);
        let out = &mut horizontal[y * width..(y + 1) * width];
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &wk) in w.iter().enumerate() {
                acc += wk * row[mirror_index(x as isize + k as isize - r, width)];
            }
            *o = acc;
        }
    }

    let mut data = frame.data.clone();
    for y in 0..height {
        let rows: Vec<&[f64]> = (0..w.len())
            .map(|k| {
                let yy = mirror_index(y as isize + k as isize - r, height);
                &horizontal[yy * width..(yy + 1) * width]
            })
            .collect();
        let out = &mut data[y * width..(y + 1) * width];
        for (x, o) in out.iter_mut().enumerate() {
            let mut mean = 0.0;
            for (wk, row) in w.iter().zip(&rows) {
                mean += wk * row[x];
            }
            *o -= mean;
        }
    }
    Plane { width, height, data }
}

pub fn spatial_ms_frames(frames: &[Plane]) -> Vec<Plane> {
    crate::par::map_slice(frames, spatial_ms)
}

#![allow(dead_code)]

use greed_core::video_io::{FrameRate, LumaVideo, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Drifting sinusoidal gratings plus a weak static texture, in [0, 255].
/// Most energy sits at low spatial frequencies, as in natural footage, and
/// motion stays within a few pixels per frame.
pub fn drifting_content(seed: u64, width: usize, height: usize, frames: usize, fps: u64) -> LumaVideo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gratings: Vec<[f64; 5]> = (0..5)
        .map(|_| {
            let theta = rng.random_range(0.0..std::f64::consts::PI);
            let freq = rng.random_range(0.003..0.03);
            let speed = rng.random_range(0.5..2.0);
            let amp = rng.random_range(10.0..25.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            [theta, freq, speed, amp, phase]
        })
        .collect();
    let texture: Vec<f64> = (0..width * height).map(|_| rng.random_range(-6.0..6.0)).collect();
    let frames = (0..frames)
        .map(|t| {
            Plane::from_fn(width, height, |x, y| {
                let mut v = 128.0 + texture[y * width + x];
                for g in &gratings {
                    let along = x as f64 * g[0].cos() + y as f64 * g[0].sin() - g[2] * t as f64;
                    v += g[3] * (std::f64::consts::TAU * g[1] * along + g[4]).sin();
                }
                v.clamp(0.0, 255.0)
            })
        })
        .collect();
    LumaVideo::new(frames, FrameRate::integer(fps).unwrap()).unwrap()
}

/// Independent uniform pixels in [0, 255).
pub fn random_video(seed: u64, width: usize, height: usize, frames: usize, fps: u64) -> LumaVideo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = (0..frames).map(|_| Plane::from_fn(width, height, |_, _| rng.random_range(0.0..255.0))).collect();
    LumaVideo::new(frames, FrameRate::integer(fps).unwrap()).unwrap()
}

/// `video` plus white Gaussian noise of standard deviation `sigma`.
pub fn add_noise(video: &LumaVideo, sigma: f64, seed: u64) -> LumaVideo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = video
        .frames()
        .iter()
        .map(|f| {
            let data = f
                .data
                .iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    v + sigma * z
                })
                .collect();
            Plane::new(f.width, f.height, data)
        })
        .collect();
    LumaVideo::new(frames, video.fps()).unwrap()
}

/// Every other frame at half the frame rate.
pub fn halve_rate(video: &LumaVideo) -> LumaVideo {
    let kept: Vec<usize> = (0..video.len()).step_by(2).collect();
    let fps = FrameRate::new(video.fps().num(), 2 * video.fps().den()).unwrap();
    video.select(&kept, fps).unwrap()
}

/// GGD samples with shape `beta` and scale `alpha`: `alpha * sign * G^(1/beta)`
/// where `G ~ Gamma(1/beta, 1)`.
pub fn ggd_samples(beta: f64, alpha: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = rand_distr::Gamma::new(1.0 / beta, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let g: f64 = gamma.sample(&mut rng);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            alpha * sign * g.powf(1.0 / beta)
        })
        .collect()
}

/// Biased sample variance and kurtosis `m4 / m2^2`.
pub fn moments(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in x {
        let d = (v - mean) * (v - mean);
        m2 += d;
        m4 += d * d;
    }
    (m2 / n, (m4 / n) / (m2 / n).powi(2))
}

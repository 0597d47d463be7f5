mod common;

use greed_core::bandpass::{build_packet_filters, mirror_index, temporal_filter, Wavelet};
use greed_core::video_io::{FrameRate, LumaVideo, Plane};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn series(values: &[f64]) -> LumaVideo {
    let frames = values.iter().map(|&v| Plane::filled(1, 1, v)).collect();
    LumaVideo::new(frames, FrameRate::integer(120).unwrap()).unwrap()
}

#[test]
fn haar_level_one_is_a_scaled_frame_difference() {
    let v = common::random_video(1, 6, 5, 20, 60);
    let bank = build_packet_filters(Wavelet::Haar, 1).unwrap();
    let out = temporal_filter(&v, &bank.filters[0]).unwrap();
    for t in 0..v.len() - 1 {
        for (i, &y) in out.coeffs[t].data.iter().enumerate() {
            let expected = (v.frame(t + 1).data[i] - v.frame(t).data[i]) / 2f64.sqrt();
            assert!((y - expected).abs() < 1e-12, "t={t} i={i}");
        }
    }
}

#[test]
fn matches_a_per_pixel_loop() {
    let v = common::random_video(2, 8, 8, 32, 60);
    let bank = build_packet_filters(Wavelet::Haar, 3).unwrap();
    let h = &bank.filters[3];
    let out = temporal_filter(&v, h).unwrap();
    let n = v.len() as isize;
    let half = (h.len() / 2) as isize;
    for y in 0..8 {
        for x in 0..8 {
            for t in 0..n {
                let mut acc = 0.0;
                for (j, &tap) in h.iter().enumerate() {
                    // half-sample symmetric extension written out by hand
                    let mut s = t + half - j as isize;
                    while s < 0 || s >= n {
                        s = if s < 0 { -s - 1 } else { 2 * n - 1 - s };
                    }
                    acc += tap * v.frame(s as usize).get(x, y);
                }
                let got = out.coeffs[t as usize].get(x, y);
                assert!((got - acc).abs() < 1e-9, "({x},{y},{t}): {got} vs {acc}");
            }
        }
    }
}

#[test]
fn mirror_index_is_half_sample_symmetric() {
    let n = 5;
    let got: Vec<usize> = (-6..11).map(|i| mirror_index(i, n)).collect();
    assert_eq!(got, vec![4, 4, 3, 2, 1, 0, 0, 1, 2, 3, 4, 4, 3, 2, 1, 0, 0]);
}

/// Orthonormal trees: the undecimated leaves of a depth-L tree form a
/// tight frame with bound 2^L, so the leaf energies over whole periods sum
/// to 2^L times the signal energy.
#[test]
fn energy_partition_for_orthonormal_wavelets() {
    let period = 16;
    let n = period * 14;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cycle: Vec<f64> = (0..period).map(|_| rng.random_range(-50.0..50.0)).collect();
    let signal: Vec<f64> = (0..n).map(|t| cycle[t % period]).collect();
    for wavelet in [Wavelet::Haar, Wavelet::Db2] {
        let bank = build_packet_filters(wavelet, 3).unwrap();
        let window = 4 * period..10 * period;
        let input: f64 = signal[window.clone()].iter().map(|x| x * x).sum();
        let v = series(&signal);
        let mut total = 0.0;
        for h in bank.filters.iter().chain(std::iter::once(&bank.lowpass)) {
            let out = temporal_filter(&v, h).unwrap();
            total += out.coeffs[window.clone()].iter().map(|p| p.data[0] * p.data[0]).sum::<f64>();
        }
        let ratio = total / (8.0 * input);
        assert!((ratio - 1.0).abs() < 1e-6, "{wavelet}: ratio {ratio}");
    }
}

/// Energies are taken per unit filter energy, which changes nothing for the
/// orthonormal wavelets and compensates the uneven leaf gains of bior2.2.
#[test]
fn band_energy_peaks_at_the_nearest_center_frequency() {
    for wavelet in Wavelet::ALL {
        let bank = build_packet_filters(wavelet, 3).unwrap();
        let centers = &bank.center_freqs;
        assert!(centers.windows(2).all(|w| w[0] < w[1]), "{wavelet}: {centers:?}");
        for (probe, &w) in centers.iter().enumerate() {
            let signal: Vec<f64> = (0..512).map(|t| (w * t as f64 + 0.3).cos()).collect();
            let v = series(&signal);
            let energies: Vec<f64> = bank
                .filters
                .iter()
                .map(|h| temporal_filter(&v, h).unwrap().coeffs[64..448].iter().map(|p| p.data[0].powi(2)).sum::<f64>() / h.iter().map(|x| x * x).sum::<f64>())
                .collect();
            let best = (0..energies.len()).max_by(|&a, &b| energies[a].total_cmp(&energies[b])).unwrap();
            assert_eq!(best, probe, "{wavelet}: probe {w:.3} rad, energies {energies:?}");
        }
    }
}

#[test]
fn high_pass_bands_ignore_static_content() {
    let frame = Plane::from_fn(9, 7, |x, y| (x * 31 + y * 17) as f64 % 255.0);
    let v = LumaVideo::new(vec![frame; 40], FrameRate::integer(60).unwrap()).unwrap();
    for wavelet in Wavelet::ALL {
        for h in build_packet_filters(wavelet, 3).unwrap().filters {
            let out = temporal_filter(&v, &h).unwrap();
            assert!(out.values().all(|x| x.abs() < 1e-9));
        }
    }
}

//! Equivalent FIR filters of a wavelet packet tree.
//!
//! A depth-`L` packet tree splits every node into low and high branches.
//! Without decimation, the leaf reached by choosing filter `F_j` at level
//! `j` is the cascade `F_1(z) F_2(z^2) ... F_L(z^{2^(L-1)})`. Leaves come out
//! in natural (Paley) order; high-pass branches mirror the spectrum, so the
//! frequency ordering is recovered with a Gray-code permutation.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BandpassError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Wavelet {
    #[serde(rename = "haar")]
    Haar,
    #[serde(rename = "db2")]
    Db2,
    #[default]
    #[serde(rename = "bior2.2")]
    Bior22,
}

impl Wavelet {
    pub const ALL: [Wavelet; 3] = [Wavelet::Haar, Wavelet::Db2, Wavelet::Bior22];

    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Bior22 => "bior2.2",
        }
    }

    /// Analysis (decomposition) low-pass and high-pass taps.
    ///
    /// Low-pass taps follow the PyWavelets `dec_lo` tables. High-pass taps are
    /// `dec_hi` negated, which makes the Haar high-pass a forward difference
    /// `[1, -1] / sqrt(2)`; the sign has no effect on band energies.
    pub fn analysis_pair(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Wavelet::Haar => (vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2]),
            Wavelet::Db2 => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * std::f64::consts::SQRT_2;
                let lo = vec![(1.0 - s3) / d, (3.0 - s3) / d, (3.0 + s3) / d, (1.0 + s3) / d];
                // alternating flip of the low-pass
                let l = lo.len();
                let hi = (0..l).map(|n| if n % 2 == 0 { lo[l - 1 - n] } else { -lo[l - 1 - n] }).collect();
                (lo, hi)
            }
            Wavelet::Bior22 => {
                let a = std::f64::consts::SQRT_2 / 4.0;
                let b = std::f64::consts::SQRT_2 / 8.0;
                let lo = vec![0.0, -b, a, 3.0 * a, a, -b];
                let hi = vec![0.0, -a, 2.0 * a, -a, 0.0, 0.0];
                (lo, hi)
            }
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = BandpassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "bior2.2" | "bior22" => Ok(Wavelet::Bior22),
            _ => Err(BandpassError::UnknownWavelet(s.to_string())),
        }
    }
}

/// The band-pass leaves of a packet tree, in increasing frequency order.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub wavelet: Wavelet,
    pub levels: u32,
    /// `2^levels - 1` band-pass filters; the all-low-pass leaf is excluded.
    pub filters: Vec<Vec<f64>>,
    /// Nominal center of each band, `(f + 1/2) * pi / 2^levels` for band
    /// position `f`, in radians per sample.
    pub center_freqs: Vec<f64>,
    /// The excluded all-low-pass leaf, kept for energy bookkeeping.
    pub lowpass: Vec<f64>,
}

impl FilterBank {
    pub fn len(&self) -> usize {
        self.filters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filters.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.filters.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn upsample(taps: &[f64], factor: usize) -> Vec<f64> {
    let mut out = vec![0.0; (taps.len() - 1) * factor + 1];
    for (i, &t) in taps.iter().enumerate() {
        out[i * factor] = t;
    }
    out
}

/// Builds the `2^levels - 1` band-pass equivalent filters of a depth-`levels`
/// wavelet packet tree, ordered by center frequency.
pub fn build_packet_filters(wavelet: Wavelet, levels: u32) -> Result<FilterBank, BandpassError> {
    if levels == 0 {
        return Err(BandpassError::ZeroLevels);
    }
    let (lo, hi) = wavelet.analysis_pair();
    let leaves = 1usize << levels;

    // natural order: bit (levels - 1 - j) of the index chooses hi at level j
    let natural: Vec<Vec<f64>> = (0..leaves)
        .map(|n| {
            (0..levels).fold(vec![1.0], |acc, j| {
                let high = (n >> (levels - 1 - j)) & 1 == 1;
                let stage = upsample(if high { &hi } else { &lo }, 1 << j);
                convolve(&acc, &stage)
            })
        })
        .collect();

    let mut by_freq: Vec<Vec<f64>> = (0..leaves).map(|f| natural[f ^ (f >> 1)].clone()).collect();
    let lowpass = by_freq.remove(0);
    let width = PI / leaves as f64;
    let center_freqs = (1..leaves).map(|f| (f as f64 + 0.5) * width).collect();
    Ok(FilterBank { wavelet, levels, filters: by_freq, center_freqs, lowpass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(taps: &[f64]) -> f64 {
        taps.iter().sum()
    }

    #[test]
    fn haar_level_one_is_a_scaled_difference() {
        let bank = build_packet_filters(Wavelet::Haar, 1).unwrap();
        assert_eq!(bank.filters, vec![vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2]]);
    }

    #[test]
    fn haar_level_three_is_orthonormal() {
        let bank = build_packet_filters(Wavelet::Haar, 3).unwrap();
        assert_eq!(bank.len(), 7);
        for h in &bank.filters {
            assert_eq!(h.len(), 8);
            let norm: f64 = h.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalent_lengths_follow_the_cascade_formula() {
        for (wavelet, l) in [(Wavelet::Haar, 2usize), (Wavelet::Db2, 4), (Wavelet::Bior22, 6)] {
            let bank = build_packet_filters(wavelet, 3).unwrap();
            let expected = (0..3).map(|j| (1 << j) * (l - 1)).sum::<usize>() + 1;
            assert!(bank.filters.iter().all(|h| h.len() == expected), "{wavelet}");
        }
        let db2 = build_packet_filters(Wavelet::Db2, 3).unwrap();
        assert_eq!(db2.max_len(), 22);
    }

    #[test]
    fn band_pass_leaves_have_no_dc() {
        for wavelet in Wavelet::ALL {
            let bank = build_packet_filters(wavelet, 3).unwrap();
            for h in &bank.filters {
                assert!(dc(h).abs() < 1e-10, "{wavelet}: {}", dc(h));
            }
            assert!(dc(&bank.lowpass).abs() > 1.0);
        }
    }

    #[test]
    fn centers_increase() {
        for wavelet in Wavelet::ALL {
            for levels in 1..=4 {
                let bank = build_packet_filters(wavelet, levels).unwrap();
                assert_eq!(bank.len(), (1 << levels) - 1);
                assert!(
                    bank.center_freqs.windows(2).all(|w| w[0] < w[1]),
                    "{wavelet} L{levels}: {:?}",
                    bank.center_freqs
                );
            }
        }
    }

    #[test]
    fn wavelet_names_round_trip() {
        for w in Wavelet::ALL {
            assert_eq!(w.name().parse::<Wavelet>().unwrap(), w);
        }
        assert!(matches!("sym4".parse::<Wavelet>(), Err(BandpassError::UnknownWavelet(_))));
    }

    #[test]
    fn zero_levels_rejected() {
        assert!(matches!(build_packet_filters(Wavelet::Haar, 0), Err(BandpassError::ZeroLevels)));
    }
}

use super::EvalError;
use crate::bandpass::SubbandStack;

/// Unit-area histogram over `[-range, range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub range: f64,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        2.0 * self.range / self.centers.len() as f64
    }

    /// Total area; 1 up to rounding.
    pub fn area(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }

    /// Two whitespace-separated columns: bin center and density.
    pub fn to_text(&self) -> String {
        self.centers.iter().zip(&self.density).map(|(c, d)| format!("{c:.6e} {d:.6e}\n")).collect()
    }
}

/// Histogram of arbitrary values over the symmetric range set by the largest
/// magnitude. All-zero input uses range 1.
pub fn histogram_values(values: &[f64], bins: usize) -> Result<Histogram, EvalError> {
    if bins < 2 {
        return Err(EvalError::TooFewBins(bins));
    }
    if values.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("histogram input"));
    }
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let range = if peak > 0.0 { peak } else { 1.0 };
    let width = 2.0 * range / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let b = ((v + range) / width).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let norm = values.len() as f64 * width;
    let centers = (0..bins).map(|i| -range + (i as f64 + 0.5) * width).collect();
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok(Histogram { range, centers, density })
}

/// Histogram of every coefficient in a band-pass stack.
pub fn dump_histogram(stack: &SubbandStack, bins: usize) -> Result<Histogram, EvalError> {
    let values: Vec<f64> = stack.coeffs.iter().flat_map(|p| p.data.iter().copied()).collect();
    histogram_values(&values, bins)
}

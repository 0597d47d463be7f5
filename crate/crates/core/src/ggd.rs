//! Zero-mean generalized Gaussian statistics.
//!
//! Density `f(x) = beta / (2 alpha Gamma(1/beta)) * exp(-(|x|/alpha)^beta)`.
//! The shape is recovered from kurtosis (a strictly decreasing function of
//! `beta`), the scale from the standard deviation, and the differential
//! entropy has a closed form. Entropies are in nats.

use std::f64::consts::PI;

use thiserror::Error;

/// Shape parameter clamp range used by [`beta_from_kurtosis`].
pub const BETA_MIN: f64 = 0.05;
pub const BETA_MAX: f64 = 10.0;

#[derive(Debug, Error, PartialEq)]
pub enum GgdError {
    #[error("gamma function argument must be positive, got {0}")]
    NonPositiveGammaArg(f64),
    #[error("kurtosis is NaN")]
    NanKurtosis,
    #[error("invalid moments: variance {variance}, kurtosis {kurtosis}, noise variance {noise_var}")]
    InvalidMoments { variance: f64, kurtosis: f64, noise_var: f64 },
    #[error("zero scale parameter: degenerate patch")]
    DegenerateScale,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos series `A(z)` and `t = z + g + 0.5` for `Gamma(z + 1)`.
fn lanczos_series(z: f64) -> (f64, f64) {
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (a, z + LANCZOS_G + 0.5)
}

/// `ln Gamma(a)` for `a > 0`.
pub fn ln_gamma(a: f64) -> Result<f64, GgdError> {
    if !(a > 0.0) {
        return Err(GgdError::NonPositiveGammaArg(a));
    }
    if a < 0.5 {
        // reflection
        return Ok((PI / (PI * a).sin()).ln() - ln_gamma(1.0 - a)?);
    }
    let (series, t) = lanczos_series(a - 1.0);
    Ok(0.5 * (2.0 * PI).ln() + (a - 0.5) * t.ln() - t + series.ln())
}

/// `Gamma(a)` for `a > 0`. Overflows to infinity above `a ~ 171.6`.
pub fn gamma_fn(a: f64) -> Result<f64, GgdError> {
    if !(a > 0.0) {
        return Err(GgdError::NonPositiveGammaArg(a));
    }
    if a < 0.5 {
        return Ok(PI / ((PI * a).sin() * gamma_fn(1.0 - a)?));
    }
    let (series, t) = lanczos_series(a - 1.0);
    // split the power so t^(a - 0.5) does not overflow before e^-t scales it
    let half = t.powf(0.5 * (a - 0.5));
    Ok((2.0 * PI).sqrt() * half * ((-t).exp() * half) * series)
}

fn ln_gamma_pos(a: f64) -> f64 {
    ln_gamma(a).expect("argument is positive")
}

/// Kurtosis `Gamma(5/b) Gamma(1/b) / Gamma(3/b)^2` of a GGD with shape `b`.
pub fn ggd_kurtosis(beta: f64) -> f64 {
    debug_assert!(beta > 0.0);
    let inv = 1.0 / beta;
    (ln_gamma_pos(5.0 * inv) + ln_gamma_pos(inv) - 2.0 * ln_gamma_pos(3.0 * inv)).exp()
}

/// Inverts [`ggd_kurtosis`] by bisection, clamping to `[BETA_MIN, BETA_MAX]`.
///
/// Kurtosis above `kappa(BETA_MIN)` maps to `BETA_MIN`; kurtosis below
/// `kappa(BETA_MAX)`, including values under the GGD infimum of 1.8, maps to
/// `BETA_MAX`.
pub fn beta_from_kurtosis(kappa: f64) -> Result<f64, GgdError> {
    if kappa.is_nan() {
        return Err(GgdError::NanKurtosis);
    }
    if kappa >= ggd_kurtosis(BETA_MIN) {
        return Ok(BETA_MIN);
    }
    if kappa <= ggd_kurtosis(BETA_MAX) {
        return Ok(BETA_MAX);
    }
    // kurtosis is decreasing in beta; bisect on ln(beta)
    let (mut lo, mut hi) = (BETA_MIN.ln(), BETA_MAX.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let k = ggd_kurtosis(mid.exp());
        if k == kappa {
            return Ok(mid.exp());
        }
        if k > kappa {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Variance and kurtosis after passing through an additive Gaussian channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyMoments {
    pub variance: f64,
    pub kurtosis: f64,
}

/// `var + noise` and `kurt * (var / (var + noise))^2`.
///
/// Only the signal's kurtosis is propagated; the noise's own fourth-moment
/// contribution is not added.
pub fn noisy_moments(var_obs: f64, kurt_obs: f64, noise_var: f64) -> Result<NoisyMoments, GgdError> {
    if !(var_obs >= 0.0) || !(kurt_obs >= 0.0) || !(noise_var > 0.0) || !var_obs.is_finite() || !kurt_obs.is_finite() {
        return Err(GgdError::InvalidMoments { variance: var_obs, kurtosis: kurt_obs, noise_var });
    }
    let variance = var_obs + noise_var;
    let ratio = var_obs / variance;
    Ok(NoisyMoments { variance, kurtosis: kurt_obs * ratio * ratio })
}

/// Scale from standard deviation: `sigma * sqrt(Gamma(1/b) / Gamma(3/b))`.
pub fn alpha_from_sigma_beta(sigma: f64, beta: f64) -> f64 {
    sigma * scale_factor(beta)
}

fn scale_factor(beta: f64) -> f64 {
    (0.5 * (ln_gamma_pos(1.0 / beta) - ln_gamma_pos(3.0 / beta))).exp()
}

/// Differential entropy `1/b - ln(b / (2 a Gamma(1/b)))` in nats.
pub fn ggd_entropy(alpha: f64, beta: f64) -> Result<f64, GgdError> {
    if !(alpha > 0.0) {
        return Err(GgdError::DegenerateScale);
    }
    Ok(EntropyKernel::new(beta).entropy_from_alpha(alpha))
}

/// Biased central moments `(m2, m4 / m2^2)`; kurtosis is 0 when `m2 == 0`.
pub fn sample_moments(data: &[f64]) -> (f64, f64) {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in data {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    let kurt = if m2 > 0.0 { m4 / (m2 * m2) } else { 0.0 };
    (m2, kurt)
}

/// GGD scale and shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgdParams {
    pub alpha: f64,
    pub beta: f64,
}

impl GgdParams {
    /// Moment matching: shape from kurtosis, scale from variance.
    pub fn from_moments(variance: f64, kurtosis: f64) -> Result<Self, GgdError> {
        let beta = beta_from_kurtosis(kurtosis)?;
        Ok(GgdParams { alpha: alpha_from_sigma_beta(variance.sqrt(), beta), beta })
    }

    pub fn entropy(&self) -> Result<f64, GgdError> {
        ggd_entropy(self.alpha, self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha / scale_factor(self.beta);
        s * s
    }
}

/// Per-shape constants so the entropy of many patches sharing one `beta`
/// costs one `ln` each.
#[derive(Debug, Clone, Copy)]
pub struct EntropyKernel {
    beta: f64,
    scale_factor: f64,
    // 1/b - ln b + ln 2 + ln Gamma(1/b)
    offset: f64,
}

impl EntropyKernel {
    pub fn new(beta: f64) -> Self {
        let offset = 1.0 / beta - beta.ln() + std::f64::consts::LN_2 + ln_gamma_pos(1.0 / beta);
        EntropyKernel { beta, scale_factor: scale_factor(beta), offset }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn entropy_from_alpha(&self, alpha: f64) -> f64 {
        self.offset + alpha.ln()
    }

    /// Entropy of a GGD with this shape and the given variance.
    pub fn entropy_from_variance(&self, variance: f64) -> f64 {
        self.entropy_from_alpha(variance.sqrt() * self.scale_factor)
    }
}

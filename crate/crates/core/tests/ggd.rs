mod common;

use greed_core::ggd::{alpha_from_sigma_beta, beta_from_kurtosis, ggd_entropy, noisy_moments, GgdParams};

#[test]
fn sample_moments_recover_shape_and_scale() {
    for (i, (beta, alpha)) in [(0.7, 2.0), (1.3, 0.5), (2.0, 3.0), (3.0, 1.0)].into_iter().enumerate() {
        let x = common::ggd_samples(beta, alpha, 400_000, 10 + i as u64);
        let (var, kurt) = common::moments(&x);
        let b = beta_from_kurtosis(kurt).unwrap();
        assert!((b - beta).abs() < 0.05 * beta, "beta {beta}: got {b}");
        let a = alpha_from_sigma_beta(var.sqrt(), b);
        assert!((a - alpha).abs() < 0.05 * alpha, "alpha {alpha}: got {a}");
        let p = GgdParams::from_moments(var, kurt).unwrap();
        assert!((p.variance() - var).abs() < 1e-9 * var);
    }
}

#[test]
fn added_noise_adds_its_variance() {
    let x = common::ggd_samples(1.0, 1.0, 400_000, 21);
    let noise = common::ggd_samples(2.0, (2.0f64 * 0.1).sqrt(), 400_000, 22);
    let noisy: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + b).collect();
    let (var, kurt) = common::moments(&x);
    let (var_noisy, _) = common::moments(&noisy);
    let predicted = noisy_moments(var, kurt, 0.1).unwrap();
    assert!((predicted.variance - var_noisy).abs() < 0.01 * var_noisy);
}

#[test]
fn entropy_grows_by_ln2_when_scale_doubles() {
    for beta in [0.3, 0.9, 1.6, 2.4, 5.0, 9.0] {
        let h1 = ggd_entropy(0.8, beta).unwrap();
        let h2 = ggd_entropy(1.6, beta).unwrap();
        assert!((h2 - h1 - 2f64.ln()).abs() < 1e-12);
    }
}

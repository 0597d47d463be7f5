use serde::{Deserialize, Serialize};

use super::smo::solve_epsilon_svr;
use super::RegressionError;

/// Stopping threshold on the maximal KKT violation.
pub const KKT_TOLERANCE: f64 = 1e-3;
const MAX_ITERATIONS: usize = 10_000_000;

/// `C`, tube half-width and RBF width `gamma` in `exp(-gamma |x - v|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub c: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

impl Hyperparams {
    pub fn new(c: f64, epsilon: f64, gamma: f64) -> Self {
        Hyperparams { c, epsilon, gamma }
    }

    fn validate(&self) -> Result<(), RegressionError> {
        let ok = self.c > 0.0 && self.epsilon >= 0.0 && self.gamma > 0.0;
        let finite = self.c.is_finite() && self.epsilon.is_finite() && self.gamma.is_finite();
        if ok && finite {
            Ok(())
        } else {
            Err(RegressionError::InvalidHyperparams(format!("{self:?}")))
        }
    }
}

/// Per-column `(x - shift) / scale` with the training mean and standard
/// deviation. Constant columns get scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let mut shift = vec![0.0; dim];
        for r in rows {
            for (s, &x) in shift.iter_mut().zip(r) {
                *s += x;
            }
        }
        shift.iter_mut().for_each(|s| *s /= n);
        let mut scale = vec![0.0; dim];
        for r in rows {
            for ((v, &x), &m) in scale.iter_mut().zip(r).zip(&shift) {
                *v += (x - m) * (x - m);
            }
        }
        let scale = scale
            .into_iter()
            .map(|v| {
                let sd = (v / n).sqrt();
                if sd > 0.0 && sd.is_finite() {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { shift, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).zip(&self.scale).map(|((&v, &m), &s)| (v - m) / s).collect()
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }
}

/// A trained RBF epsilon-SVR. Support vectors are stored standardized.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub hyperparams: Hyperparams,
    pub standardizer: Standardizer,
}

impl SvrModel {
    pub fn kernel_gamma(&self) -> f64 {
        self.hyperparams.gamma
    }

    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    /// Checks the box and equality constraints of the dual.
    pub fn check_invariants(&self) -> Result<(), RegressionError> {
        let c = self.hyperparams.c;
        if self.dual_coeffs.iter().any(|a| a.abs() > c * (1.0 + 1e-12)) {
            return Err(RegressionError::Corrupt("dual_coeffs exceed C".into()));
        }
        let sum: f64 = self.dual_coeffs.iter().sum();
        if sum.abs() > 1e-6 * c {
            return Err(RegressionError::Corrupt("dual_coeffs do not sum to zero".into()));
        }
        if self.standardizer.scale.iter().any(|&s| !(s > 0.0)) {
            return Err(RegressionError::Corrupt("feature_scale".into()));
        }
        if self.support_vectors.len() != self.dual_coeffs.len() || self.support_vectors.iter().any(|v| v.len() != self.dim()) {
            return Err(RegressionError::Corrupt("support_vectors".into()));
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn validate_inputs(features: &[Vec<f64>], labels: &[f64]) -> Result<usize, RegressionError> {
    if features.len() != labels.len() {
        return Err(RegressionError::LabelCount { features: features.len(), labels: labels.len() });
    }
    if features.len() < 2 {
        return Err(RegressionError::TooFewSamples(features.len()));
    }
    let dim = features[0].len();
    for (row, f) in features.iter().enumerate() {
        if f.len() != dim {
            return Err(RegressionError::Dimension { row, expected: dim, got: f.len() });
        }
        if f.iter().any(|x| !x.is_finite()) {
            return Err(RegressionError::NonFinite("features"));
        }
    }
    if labels.iter().any(|x| !x.is_finite()) {
        return Err(RegressionError::NonFinite("labels"));
    }
    Ok(dim)
}

/// Trains an RBF epsilon-SVR on standardized features.
///
/// All-equal labels give a constant model with no support vectors.
pub fn train_svr(features: &[Vec<f64>], labels: &[f64], hyperparams: Hyperparams) -> Result<SvrModel, RegressionError> {
    validate_inputs(features, labels)?;
    hyperparams.validate()?;
    let standardizer = Standardizer::fit(features);
    if labels.iter().all(|&y| y == labels[0]) {
        return Ok(SvrModel {
            support_vectors: Vec::new(),
            dual_coeffs: Vec::new(),
            bias: labels[0],
            hyperparams,
            standardizer,
        });
    }
    let x: Vec<Vec<f64>> = features.iter().map(|f| standardizer.apply(f)).collect();
    let n = x.len();
    let mut kernel = vec![0.0; n * n];
    for i in 0..n {
        kernel[i * n + i] = 1.0;
        for j in 0..i {
            let v = (-hyperparams.gamma * sq_dist(&x[i], &x[j])).exp();
            kernel[i * n + j] = v;
            kernel[j * n + i] = v;
        }
    }
    let solution = solve_epsilon_svr(&kernel, labels, hyperparams.c, hyperparams.epsilon, KKT_TOLERANCE, MAX_ITERATIONS);
    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    for (xi, &a) in x.into_iter().zip(&solution.coefficients) {
        if a != 0.0 {
            support_vectors.push(xi);
            dual_coeffs.push(a);
        }
    }
    Ok(SvrModel { support_vectors, dual_coeffs, bias: solution.bias, hyperparams, standardizer })
}

/// `sum_i a_i exp(-gamma |x^ - v_i|^2) + b` on standardized `x`.
pub fn predict(model: &SvrModel, x: &[f64]) -> Result<f64, RegressionError> {
    if x.len() != model.dim() {
        return Err(RegressionError::Dimension { row: 0, expected: model.dim(), got: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFinite("prediction input"));
    }
    let z = model.standardizer.apply(x);
    let gamma = model.hyperparams.gamma;
    let sum: f64 = model
        .support_vectors
        .iter()
        .zip(&model.dual_coeffs)
        .map(|(v, &a)| a * (-gamma * sq_dist(&z, v)).exp())
        .sum();
    Ok(sum + model.bias)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
    }

    fn rmse(model: &SvrModel, x: &[Vec<f64>], y: &[f64]) -> f64 {
        let se: f64 = x.iter().zip(y).map(|(xi, &yi)| (predict(model, xi).unwrap() - yi).powi(2)).sum();
        (se / y.len() as f64).sqrt()
    }

    #[test]
    fn constant_labels() {
        let x = random_rows(5, 16, 1);
        let m = train_svr(&x, &[42.0; 5], Hyperparams::new(10.0, 0.1, 0.5)).unwrap();
        assert!(m.support_vectors.is_empty());
        for probe in random_rows(10, 16, 2) {
            assert_eq!(predict(&m, &probe).unwrap(), 42.0);
        }
    }

    #[test]
    fn epsilon_tube_holds() {
        let x = random_rows(10, 16, 3);
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let m = train_svr(&x, &y, Hyperparams::new(100.0, 0.01, 0.1)).unwrap();
        m.check_invariants().unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            assert!((predict(&m, xi).unwrap() - yi).abs() <= 0.01 + 0.05);
        }
    }

    #[test]
    fn dual_constraints() {
        let x = random_rows(40, 4, 4);
        let y: Vec<f64> = x.iter().map(|r| 50.0 + 20.0 * (r[0] * 2.0).sin() + 10.0 * r[1] * r[2]).collect();
        for c in [0.5, 10.0, 1000.0] {
            let m = train_svr(&x, &y, Hyperparams::new(c, 1.0, 0.25)).unwrap();
            let sum: f64 = m.dual_coeffs.iter().sum();
            assert!(sum.abs() <= 1e-6 * c, "sum {sum}");
            assert!(m.dual_coeffs.iter().all(|a| a.abs() <= c));
            m.check_invariants().unwrap();
        }
    }

    #[test]
    fn lone_support_vector() {
        let standardizer = Standardizer { shift: vec![0.0; 3], scale: vec![1.0; 3] };
        let m = SvrModel {
            support_vectors: vec![vec![0.5, -1.0, 2.0]],
            dual_coeffs: vec![3.25],
            bias: 0.0,
            hyperparams: Hyperparams::new(10.0, 0.1, 0.7),
            standardizer,
        };
        assert_eq!(predict(&m, &[0.5, -1.0, 2.0]).unwrap(), 3.25);
        let empty = SvrModel { support_vectors: vec![], dual_coeffs: vec![], bias: -4.0, ..m.clone() };
        assert_eq!(predict(&empty, &[9.0, 9.0, 9.0]).unwrap(), -4.0);
        assert!(predict(&m, &[f64::NAN, 0.0, 0.0]).is_err());
        assert!(predict(&m, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn predictions_are_continuous() {
        let x = random_rows(30, 16, 5);
        let y: Vec<f64> = x.iter().map(|r| r.iter().sum::<f64>() * 10.0).collect();
        let m = train_svr(&x, &y, Hyperparams::new(100.0, 0.1, 0.05)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for probe in random_rows(20, 16, 7) {
            let base = predict(&m, &probe).unwrap();
            let nudged: Vec<f64> = probe.iter().map(|v| v + rng.random_range(-1e-6..1e-6)).collect();
            let moved = predict(&m, &nudged).unwrap();
            assert!((moved - base).abs() < 1e-3, "{base} -> {moved}");
        }
    }

    #[test]
    fn column_rescaling_is_absorbed() {
        let x = random_rows(30, 5, 8);
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0] - r[3] * r[4]).collect();
        let factor = [1000.0, 1.0, 0.001, 7.0, 1.0];
        let scaled: Vec<Vec<f64>> = x.iter().map(|r| r.iter().zip(&factor).map(|(a, b)| a * b).collect()).collect();
        let hp = Hyperparams::new(10.0, 0.05, 0.2);
        let a = train_svr(&x, &y, hp).unwrap();
        let b = train_svr(&scaled, &y, hp).unwrap();
        for (xi, si) in x.iter().zip(&scaled) {
            assert!((predict(&a, xi).unwrap() - predict(&b, si).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn more_capacity_never_fits_worse() {
        let x = random_rows(25, 3, 9);
        let y: Vec<f64> = x.iter().map(|r| (3.0 * r[0]).sin() + r[1] * r[2]).collect();
        let mut last = f64::INFINITY;
        for c in [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0] {
            let m = train_svr(&x, &y, Hyperparams::new(c, 0.01, 1.0)).unwrap();
            let e = rmse(&m, &x, &y);
            assert!(e <= last + 1e-3, "C={c}: {e} > {last}");
            last = e;
        }
    }

    #[test]
    fn bad_inputs() {
        let x = random_rows(3, 2, 10);
        assert!(matches!(train_svr(&x[..1], &[1.0], Hyperparams::new(1.0, 0.1, 1.0)), Err(RegressionError::TooFewSamples(1))));
        assert!(matches!(train_svr(&x, &[1.0, 2.0], Hyperparams::new(1.0, 0.1, 1.0)), Err(RegressionError::LabelCount { .. })));
        assert!(matches!(train_svr(&x, &[1.0, 2.0, 3.0], Hyperparams::new(0.0, 0.1, 1.0)), Err(RegressionError::InvalidHyperparams(_))));
    }
}

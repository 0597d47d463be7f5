use serde::Serialize;

use super::rank::pearson;
use super::EvalError;

/// Iteration budget of the logistic fit, shared across restarts.
pub const MAX_ITERATIONS: usize = 10_000;

/// `Q(x) = b2 + (b1 - b2) / (1 + exp(-(x - b3) / |b4|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticParams {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
}

impl LogisticParams {
    pub fn eval(&self, x: f64) -> f64 {
        self.b2 + (self.b1 - self.b2) / (1.0 + (-(x - self.b3) / self.b4.abs()).exp())
    }

    fn from_slice(p: &[f64]) -> Self {
        LogisticParams { b1: p[0], b2: p[1], b3: p[2], b4: p[3] }
    }

    fn to_vec(self) -> Vec<f64> {
        vec![self.b1, self.b2, self.b3, self.b4]
    }
}

/// Minimizes `f` starting from a simplex around `x0` with per-coordinate
/// offsets `step`. Returns `(best point, best value, iterations, converged)`.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: &[f64], max_iter: usize, ftol: f64) -> (Vec<f64>, f64, usize, bool)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut iter = 0;
    let mut converged = false;
    while iter < max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        if spread <= ftol * (values[0].abs() + ftol) {
            converged = true;
            break;
        }
        iter += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let toward = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };

        let xr = toward(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = toward(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = toward(-0.5);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = toward(0.5);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = best.iter().zip(&simplex[i]).map(|(b, x)| b + 0.5 * (x - b)).collect();
            values[i] = f(&simplex[i]);
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best].clone(), values[best], iter, converged)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogisticFit {
    pub params: LogisticParams,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Least-squares fit of the logistic to `(pred, dmos)`, restarting the
/// simplex at the incumbent until a restart no longer improves it.
pub fn fit_logistic(pred: &[f64], dmos: &[f64]) -> LogisticFit {
    let n = pred.len() as f64;
    let max = dmos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = dmos.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = pred.iter().sum::<f64>() / n;
    let sd = (pred.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n).sqrt();
    let init = LogisticParams { b1: max, b2: min, b3: mean, b4: if sd > 0.0 { sd } else { 1.0 } };
    let sse = |p: &[f64]| -> f64 {
        let q = LogisticParams::from_slice(p);
        let s: f64 = pred.iter().zip(dmos).map(|(&x, &y)| (q.eval(x) - y).powi(2)).sum();
        if s.is_finite() {
            s
        } else {
            f64::INFINITY
        }
    };
    let range = (max - min).abs().max(1e-3);
    let mut x = init.to_vec();
    let mut best = sse(&x);
    let mut used = 0;
    let mut converged;
    loop {
        let step: Vec<f64> = x.iter().map(|v| if v.abs() > 1e-3 { 0.1 * v.abs() } else { 0.1 * range }).collect();
        let (xn, fnew, it, ok) = nelder_mead(sse, &x, &step, MAX_ITERATIONS - used, 1e-15);
        used += it;
        converged = ok;
        let improved = fnew < best * (1.0 - 1e-12) && best > 0.0;
        if fnew <= best {
            x = xn;
            best = fnew;
        }
        if !improved || !ok || used >= MAX_ITERATIONS || best == 0.0 {
            break;
        }
    }
    LogisticFit { params: LogisticParams::from_slice(&x), sse: best, iterations: used, converged }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlccRmse {
    /// `None` when the mapped predictions are constant.
    pub plcc: Option<f64>,
    pub rmse: f64,
    pub logistic: LogisticParams,
    pub converged: bool,
}

/// PLCC and RMSE between logistically mapped predictions and DMOS.
pub fn plcc_rmse(pred: &[f64], dmos: &[f64]) -> Result<PlccRmse, EvalError> {
    if pred.len() != dmos.len() {
        return Err(EvalError::LengthMismatch(pred.len(), dmos.len()));
    }
    if pred.len() < 5 {
        return Err(EvalError::TooFewSamples { needed: 5, got: pred.len() });
    }
    if pred.iter().chain(dmos).any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite("plcc_rmse input"));
    }
    let n = pred.len() as f64;
    if pred.iter().all(|&p| p == pred[0]) {
        // The best constant mapping is the DMOS mean.
        let mean = dmos.iter().sum::<f64>() / n;
        let rmse = (dmos.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
        let logistic = LogisticParams { b1: mean, b2: mean, b3: pred[0], b4: 1.0 };
        return Ok(PlccRmse { plcc: None, rmse, logistic, converged: true });
    }
    let fit = fit_logistic(pred, dmos);
    let mapped: Vec<f64> = pred.iter().map(|&x| fit.params.eval(x)).collect();
    let rmse = (fit.sse / n).sqrt();
    Ok(PlccRmse { plcc: pearson(&mapped, dmos), rmse, logistic: fit.params, converged: fit.converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let (x, v, _, ok) = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], 10_000, 1e-15);
        assert!(ok);
        assert!(v < 1e-10);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn plant_and_recover() {
        let truth = LogisticParams { b1: 90.0, b2: 10.0, b3: 50.0, b4: 12.0 };
        let pred: Vec<f64> = (0..60).map(|i| i as f64 * 100.0 / 59.0).collect();
        let dmos: Vec<f64> = pred.iter().map(|&x| truth.eval(x)).collect();
        let r = plcc_rmse(&pred, &dmos).unwrap();
        let got = r.logistic;
        for (g, t) in [(got.b1, truth.b1), (got.b2, truth.b2), (got.b3, truth.b3), (got.b4.abs(), truth.b4)] {
            assert!((g - t).abs() <= 0.01 * t.abs(), "{got:?}");
        }
        assert!(r.rmse < 1e-3, "rmse {}", r.rmse);
    }

    #[test]
    fn perfect_predictor() {
        let d: Vec<f64> = (0..40).map(|i| 20.0 + 1.5 * i as f64).collect();
        let r = plcc_rmse(&d, &d).unwrap();
        assert!(r.plcc.unwrap() > 0.999);
        assert!(r.rmse < 0.02 * 60.0, "rmse {}", r.rmse);
    }

    #[test]
    fn constant_predictor() {
        let d = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0];
        let r = plcc_rmse(&[3.0; 6], &d).unwrap();
        assert_eq!(r.plcc, None);
        let mean = 35.0;
        let pop_sd = (d.iter().map(|x: &f64| (x - mean).powi(2)).sum::<f64>() / 6.0).sqrt();
        assert!((r.rmse - pop_sd).abs() < 1e-12);
    }

    #[test]
    fn logistic_helps_on_monotone_nonlinear_data() {
        let pred: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let dmos: Vec<f64> = pred.iter().map(|x| 100.0 / (1.0 + (-(x - 0.6) * 12.0f64).exp())).collect();
        let raw = pearson(&pred, &dmos).unwrap();
        let mapped = plcc_rmse(&pred, &dmos).unwrap().plcc.unwrap();
        assert!(mapped >= raw - 1e-6, "{mapped} < {raw}");
    }

    #[test]
    fn errors() {
        assert!(matches!(plcc_rmse(&[1.0; 4], &[1.0; 4]), Err(EvalError::TooFewSamples { .. })));
        assert!(matches!(plcc_rmse(&[1.0; 5], &[1.0; 6]), Err(EvalError::LengthMismatch(5, 6))));
    }
}

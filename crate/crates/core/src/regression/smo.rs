//! Sequential minimal optimization for the epsilon-SVR dual.
//!
//! The `2n` dual variables are stacked as `a = [alpha; alpha*]` with labels
//! `y = [+1; -1]`, giving
//!
//! ```text
//! min 1/2 a^T Q a + p^T a   s.t.  y^T a = 0,  0 <= a <= C
//! Q_ij = y_i y_j K(i mod n, j mod n)
//! p    = [eps - z; eps + z]
//! ```
//!
//! Each step picks the maximal violating pair (first-order working set
//! selection) and solves the two-variable subproblem in closed form.

const TAU: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SmoSolution {
    /// `alpha_i - alpha*_i` per training sample.
    pub coefficients: Vec<f64>,
    /// Decision function offset: `f(x) = sum coef_i K(x_i, x) + bias`.
    pub bias: f64,
    pub iterations: usize,
    /// Final maximal KKT violation.
    pub violation: f64,
}

/// Solves the epsilon-SVR dual for a precomputed `n x n` kernel matrix.
pub fn solve_epsilon_svr(kernel: &[f64], targets: &[f64], c: f64, epsilon: f64, tol: f64, max_iter: usize) -> SmoSolution {
    let n = targets.len();
    debug_assert_eq!(kernel.len(), n * n);
    let l = 2 * n;
    let y = |t: usize| if t < n { 1.0 } else { -1.0 };
    let k = |i: usize, j: usize| kernel[(i % n) * n + (j % n)];
    let mut alpha = vec![0.0f64; l];
    let mut grad: Vec<f64> = (0..l).map(|t| if t < n { epsilon - targets[t] } else { epsilon + targets[t - n] }).collect();

    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let mut violation;
    loop {
        // i maximises -y G over I_up, j maximises y G over I_low
        let (mut gmax, mut gmax2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..l {
            if y(t) > 0.0 {
                if !upper(alpha[t]) && -grad[t] >= gmax {
                    gmax = -grad[t];
                    i = t;
                }
                if !lower(alpha[t]) && grad[t] >= gmax2 {
                    gmax2 = grad[t];
                    j = t;
                }
            } else {
                if !lower(alpha[t]) && grad[t] >= gmax {
                    gmax = grad[t];
                    i = t;
                }
                if !upper(alpha[t]) && -grad[t] >= gmax2 {
                    gmax2 = -grad[t];
                    j = t;
                }
            }
        }
        violation = gmax + gmax2;
        if violation < tol || i == usize::MAX || j == usize::MAX || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (yi, yj) = (y(i), y(j));
        let qij = yi * yj * k(i, j);
        let (qii, qjj) = (k(i, i), k(j, j));
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if yi != yj {
            let quad = (qii + qjj + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..l {
            let yt = y(t);
            grad[t] += yt * (yi * k(t, i) * di + yj * k(t, j) * dj);
        }
    }

    // offset from free variables, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..l {
        let yg = y(t) * grad[t];
        if upper(alpha[t]) {
            if y(t) < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y(t) > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { 0.5 * (ub + lb) };
    let coefficients = (0..n).map(|t| alpha[t] - alpha[t + n]).collect();
    SmoSolution { coefficients, bias: -rho, iterations, violation }
}

//! Small dense least-squares kit: damped Gauss–Newton (Levenberg–Marquardt)
//! with a finite-difference Jacobian, plus ordinary linear regression.

/// Result of one LM run.
#[derive(Debug, Clone)]
pub struct LmFit {
    pub params: Vec<f64>,
    pub sse: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative SSE improvement falls below this.
    pub sse_tol: f64,
    /// Initial damping factor.
    pub lambda0: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 300,
            sse_tol: 1e-14,
            lambda0: 1e-3,
        }
    }
}

fn sse_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes Σ residual² over `params`. `residuals(p, out)` must fill `out`
/// (length fixed at `n_residuals`). Non-finite residuals make a step rejected
/// rather than aborting the whole fit.
#[allow(clippy::needless_range_loop)]
pub fn levenberg_marquardt(
    residuals: impl Fn(&[f64], &mut [f64]),
    n_residuals: usize,
    start: &[f64],
    opts: &LmOptions,
) -> LmFit {
    let n_params = start.len();
    let mut p = start.to_vec();
    let mut r = vec![0.0; n_residuals];
    residuals(&p, &mut r);
    let mut sse = sse_of(&r);
    if !sse.is_finite() {
        return LmFit {
            params: p,
            sse: f64::INFINITY,
            iterations: 0,
            converged: false,
        };
    }

    let mut lambda = opts.lambda0;
    let mut jac = vec![vec![0.0; n_params]; n_residuals];
    let mut r_step = vec![0.0; n_residuals];
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;

        // Forward-difference Jacobian.
        for j in 0..n_params {
            let h = 1e-7 * p[j].abs().max(1e-4);
            let mut p_h = p.clone();
            p_h[j] += h;
            residuals(&p_h, &mut r_step);
            for i in 0..n_residuals {
                jac[i][j] = (r_step[i] - r[i]) / h;
            }
        }

        // Normal equations JtJ + λ·diag(JtJ).
        let mut jtj = vec![vec![0.0; n_params]; n_params];
        let mut jtr = vec![0.0; n_params];
        for i in 0..n_residuals {
            for a in 0..n_params {
                jtr[a] += jac[i][a] * r[i];
                for b in a..n_params {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 0..n_params {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut lhs = jtj.clone();
            for (a, row) in lhs.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-300);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = solve_linear(lhs, rhs) else {
                lambda *= 10.0;
                continue;
            };

            let p_new: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
            residuals(&p_new, &mut r_step);
            let sse_new = sse_of(&r_step);
            if sse_new.is_finite() && sse_new < sse {
                let rel = (sse - sse_new) / sse.max(1e-300);
                p = p_new;
                r.copy_from_slice(&r_step);
                sse = sse_new;
                lambda = (lambda * 0.1).max(1e-12);
                improved = true;
                if rel < opts.sse_tol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }

        if !improved {
            // Damping exhausted; the current point is a (local) minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }

    LmFit {
        params: p,
        sse,
        iterations,
        converged,
    }
}

/// Gaussian elimination with partial pivoting. Returns `None` on a
/// (numerically) singular system.
#[allow(clippy::needless_range_loop)]
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Ordinary least squares `y = slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let predicted: Vec<f64> = x.iter().map(|v| slope * v + intercept).collect();
    (slope, intercept, r_squared(y, &predicted))
}

/// Coefficient of determination. A constant target with zero residual gives
/// 1.0; a constant target with nonzero residual gives 0.0.
pub fn r_squared(observed: &[f64], predicted: &[f64]) -> f64 {
    let n = observed.len() as f64;
    let mean = observed.iter().sum::<f64>() / n;
    let ss_tot: f64 = observed.iter().map(|v| (v - mean) * (v - mean)).sum();
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

//! Damped least-squares minimizer behind the public fitting functions.
//!
//! Classic Levenberg damping on the normal equations: solve
//! (JᵀJ + λ·diag JᵀJ) δ = −Jᵀr, accept the step only when the residual sum
//! of squares decreases, divide λ by 10 on success, multiply by 10 on
//! rejection. The problems fitted here are tiny (≤ 8 parameters, a few
//! thousand points), so a dense solve with partial pivoting is all that is
//! needed.
//!
//! Parameters are rescaled internally so every tolerance applies to O(1)
//! numbers: positive-definite quantities (rates, cooperativities, amplitude
//! scales) are log-transformed, signed quantities (line centers, baselines)
//! are divided by a caller-provided characteristic scale. The Jacobian is
//! formed by central differences with step 1e-6 on the internal variables.

use super::FitStatus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Transform {
    /// Internal variable is value/scale.
    Linear,
    /// Internal variable is ln(value); keeps the parameter positive.
    Log,
}

#[derive(Debug, Clone)]
pub(crate) struct EngineParam {
    pub name: &'static str,
    /// Initial external (physical) value.
    pub value: f64,
    pub frozen: bool,
    pub transform: Transform,
    /// Characteristic magnitude for `Linear` parameters; ignored for `Log`.
    pub scale: f64,
}

impl EngineParam {
    fn to_internal(&self) -> f64 {
        match self.transform {
            Transform::Log => self.value.max(f64::MIN_POSITIVE).ln(),
            Transform::Linear => self.value / self.scale,
        }
    }

    fn to_external(&self, u: f64) -> f64 {
        match self.transform {
            Transform::Log => u.exp(),
            Transform::Linear => u * self.scale,
        }
    }

    /// d(external)/d(internal) at the solution, for mapping uncertainties.
    fn jacobian_factor(&self, external: f64) -> f64 {
        match self.transform {
            Transform::Log => external,
            Transform::Linear => self.scale,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct EngineResult {
    /// Final external values, in declaration order (frozen included).
    pub values: Vec<f64>,
    /// 1σ uncertainties from s²(JᵀJ)⁻¹; `None` for frozen parameters or when
    /// the covariance is unavailable.
    pub stderr: Vec<Option<f64>>,
    pub rss: f64,
    pub iterations: usize,
    pub status: FitStatus,
}

const FD_STEP: f64 = 1e-6;
const STEP_TOL: f64 = 1e-10;
const GRAD_TOL: f64 = 1e-12;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MIN: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e12;

/// Minimize Σ (model(params, x_i) − y_i)² over the non-frozen parameters.
/// `model` always receives the full external parameter vector in declaration
/// order.
pub(crate) fn minimize<F>(
    x: &[f64],
    y: &[f64],
    params: &[EngineParam],
    max_iterations: usize,
    model: F,
) -> EngineResult
where
    F: Fn(&[f64], f64) -> f64,
{
    let m = x.len();
    let free: Vec<usize> = params
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.frozen)
        .map(|(i, _)| i)
        .collect();
    let p = free.len();

    let externals = |u: &[f64]| -> Vec<f64> {
        let mut vals: Vec<f64> = params.iter().map(|q| q.value).collect();
        for (k, &i) in free.iter().enumerate() {
            vals[i] = params[i].to_external(u[k]);
        }
        vals
    };
    let residuals = |vals: &[f64]| -> Vec<f64> {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| model(vals, xi) - yi)
            .collect()
    };
    let rss_of = |r: &[f64]| -> f64 { r.iter().map(|v| v * v).sum() };

    let mut u: Vec<f64> = free.iter().map(|&i| params[i].to_internal()).collect();
    let mut r = residuals(&externals(&u));
    let mut rss = rss_of(&r);

    let finish = |u: &[f64], rss: f64, iterations: usize, status: FitStatus| -> EngineResult {
        let vals = externals(u);
        let mut stderr = vec![None; params.len()];
        if status != FitStatus::Singular && p > 0 && m > p {
            if let Some(jac) = jacobian(&externals, &residuals, u, p) {
                let normal = normal_matrix(&jac, p);
                if let Some(inv) = invert(&normal) {
                    let s2 = rss / (m - p) as f64;
                    for (k, &i) in free.iter().enumerate() {
                        let var = s2 * inv[k][k];
                        if var.is_finite() && var >= 0.0 {
                            stderr[i] =
                                Some(params[i].jacobian_factor(vals[i]).abs() * var.sqrt());
                        }
                    }
                }
            }
        }
        EngineResult {
            values: vals,
            stderr,
            rss,
            iterations,
            status,
        }
    };

    if p == 0 {
        return finish(&u, rss, 0, FitStatus::Converged);
    }
    if !rss.is_finite() {
        return finish(&u, rss, 0, FitStatus::Singular);
    }

    let mut lambda = LAMBDA_INIT;
    for iteration in 1..=max_iterations {
        let Some(jac) = jacobian(&externals, &residuals, &u, p) else {
            return finish(&u, rss, iteration, FitStatus::Singular);
        };
        // Gradient of ½·RSS and the normal matrix.
        let mut grad = vec![0.0; p];
        for i in 0..m {
            for k in 0..p {
                grad[k] += jac[i][k] * r[i];
            }
        }
        if grad.iter().all(|g| g.abs() < GRAD_TOL) {
            return finish(&u, rss, iteration, FitStatus::Converged);
        }
        let normal = normal_matrix(&jac, p);
        if normal.iter().any(|row| row.iter().any(|v| !v.is_finite())) {
            return finish(&u, rss, iteration, FitStatus::Singular);
        }

        loop {
            let mut damped = normal.clone();
            for k in 0..p {
                if damped[k][k] <= 0.0 {
                    return finish(&u, rss, iteration, FitStatus::Singular);
                }
                damped[k][k] *= 1.0 + lambda;
            }
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Some(step) = solve(damped, rhs) else {
                return finish(&u, rss, iteration, FitStatus::Singular);
            };
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + d).collect();
            let r_trial = residuals(&externals(&trial));
            let rss_trial = rss_of(&r_trial);
            let relative_step = step
                .iter()
                .zip(&u)
                .map(|(d, v)| d.abs() / (v.abs() + 1.0))
                .fold(0.0, f64::max);

            if rss_trial.is_finite() && rss_trial < rss {
                u = trial;
                r = r_trial;
                rss = rss_trial;
                lambda = (lambda / 10.0).max(LAMBDA_MIN);
                if relative_step < STEP_TOL {
                    return finish(&u, rss, iteration, FitStatus::Converged);
                }
                break; // next outer iteration with a fresh Jacobian
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                // No direction improves: converged if the proposals have
                // collapsed to nothing, otherwise give up honestly.
                let status = if relative_step < STEP_TOL {
                    FitStatus::Converged
                } else {
                    FitStatus::MaxIterations
                };
                return finish(&u, rss, iteration, status);
            }
        }
    }
    finish(&u, rss, max_iterations, FitStatus::MaxIterations)
}

/// Central-difference Jacobian of the residual vector, m×p (row-major).
/// Returns `None` when any entry fails to evaluate finite.
fn jacobian(
    externals: &impl Fn(&[f64]) -> Vec<f64>,
    residuals: &impl Fn(&[f64]) -> Vec<f64>,
    u: &[f64],
    p: usize,
) -> Option<Vec<Vec<f64>>> {
    let mut columns = Vec::with_capacity(p);
    for k in 0..p {
        let mut plus = u.to_vec();
        plus[k] += FD_STEP;
        let mut minus = u.to_vec();
        minus[k] -= FD_STEP;
        let rp = residuals(&externals(&plus));
        let rm = residuals(&externals(&minus));
        let col: Vec<f64> = rp
            .iter()
            .zip(&rm)
            .map(|(a, b)| (a - b) / (2.0 * FD_STEP))
            .collect();
        if col.iter().any(|v| !v.is_finite()) {
            return None;
        }
        columns.push(col);
    }
    let m = columns[0].len();
    Some((0..m).map(|i| (0..p).map(|k| columns[k][i]).collect()).collect())
}

fn normal_matrix(jac: &[Vec<f64>], p: usize) -> Vec<Vec<f64>> {
    let mut n = vec![vec![0.0; p]; p];
    for row in jac {
        for j in 0..p {
            for k in j..p {
                n[j][k] += row[j] * row[k];
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            n[j][k] = n[k][j];
        }
    }
    n
}

/// Gaussian elimination with partial pivoting; `None` on a vanishing pivot.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Gauss–Jordan inverse with partial pivoting; `None` when singular.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .expect("non-empty range");
        if aug[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot_row);
        let pivot = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= pivot;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = aug[row][col];
            if factor == 0.0 {
                continue;
            }
            let (source, target) = if row < col {
                let (lo, hi) = aug.split_at_mut(col);
                (&hi[0], &mut lo[row])
            } else {
                let (lo, hi) = aug.split_at_mut(row);
                (&lo[col], &mut hi[0])
            };
            for k in 0..2 * n {
                target[k] -= factor * source[k];
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

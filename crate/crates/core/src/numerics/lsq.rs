//! Damped Gauss-Newton (Levenberg) nonlinear least squares.
//!
//! Minimizes `sum_i w_i (y_i - f_i(p))^2` with additive damping `lambda * I`
//! on the normal equations. The Jacobian is taken by central finite
//! differences, one-sided next to a bound.

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Single observation. `weight` multiplies the squared residual (use `1/sigma^2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

impl DataPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, weight: 1.0 }
    }

    pub fn weighted(x: f64, y: f64, weight: f64) -> Self {
        Self { x, y, weight }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    /// Threshold for both the relative step and the relative residual change.
    pub tolerance: f64,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
    pub initial_damping: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self { max_iterations: 200, tolerance: 1e-8, fd_step: 1e-6, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `sqrt(sum_i w_i r_i^2)` at `params`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual norm after each accepted step, starting with the initial guess.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residual_history: Vec<f64>,
}

/// Fits a scalar model `y = model(params, x)` to weighted data.
pub fn nlls_fit<F>(
    model: F,
    params0: &[f64],
    data: &[DataPoint],
    bounds: Option<&[(f64, f64)]>,
    options: &LsqOptions,
) -> Result<FitResult, NumericsError>
where
    F: Fn(&[f64], f64) -> f64,
{
    let targets: Vec<f64> = data.iter().map(|d| d.y).collect();
    let weights: Vec<f64> = data.iter().map(|d| d.weight).collect();
    let xs: Vec<f64> = data.iter().map(|d| d.x).collect();
    nlls_fit_vector(|p| xs.iter().map(|&x| model(p, x)).collect(), params0, &targets, &weights, bounds, options)
}

/// Fits a model that predicts all observations at once. Non-finite
/// predictions at a trial point are treated as a rejected step.
pub fn nlls_fit_vector<F>(
    model: F,
    params0: &[f64],
    targets: &[f64],
    weights: &[f64],
    bounds: Option<&[(f64, f64)]>,
    options: &LsqOptions,
) -> Result<FitResult, NumericsError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n_params = params0.len();
    let n_obs = targets.len();
    if n_params == 0 {
        return Err(NumericsError::InvalidInput("no parameters to fit".into()));
    }
    if weights.len() != n_obs {
        return Err(NumericsError::InvalidInput("weights and targets differ in length".into()));
    }
    if n_obs < n_params {
        return Err(NumericsError::InsufficientData { points: n_obs, params: n_params });
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(NumericsError::InvalidInput(format!("weights must be positive and finite, got {w}")));
    }
    if let Some(b) = bounds {
        if b.len() != n_params {
            return Err(NumericsError::InvalidInput("bounds length differs from parameter count".into()));
        }
        for (i, (&p, &(lo, hi))) in params0.iter().zip(b).enumerate() {
            if lo > hi || p < lo || p > hi {
                return Err(NumericsError::InvalidInput(format!(
                    "initial parameter {i} = {p} outside bounds [{lo}, {hi}]"
                )));
            }
        }
    }

    let chi2_of = |p: &[f64]| -> Option<f64> {
        let pred = model(p);
        if pred.len() != n_obs {
            return None;
        }
        let chi2: f64 = pred.iter().zip(targets).zip(weights).map(|((f, y), w)| w * (y - f) * (y - f)).sum();
        chi2.is_finite().then_some(chi2)
    };

    let mut params = params0.to_vec();
    let mut chi2 = chi2_of(&params).ok_or(NumericsError::NonFiniteResidual)?;
    let mut history = vec![chi2.sqrt()];
    let mut damping = options.initial_damping;
    let mut damping_history = vec![damping];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let jac = jacobian_fd(&model, &params, bounds, options.fd_step)?;
        let pred = model(&params);
        let residuals: Vec<f64> = targets.iter().zip(&pred).map(|(y, f)| y - f).collect();
        let (normal, gradient) = normal_equations(&jac, &residuals, weights);

        let mut step_accepted = false;
        for _ in 0..64 {
            let mut damped = normal.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += damping;
            }
            let Some(delta) = solve_linear(damped, gradient.clone()) else {
                damping *= 10.0;
                damping_history.push(damping);
                if damping > 1e30 {
                    return Err(NumericsError::SingularNormalEquations { damping_history });
                }
                continue;
            };
            let trial = project(&params, &delta, bounds);
            let step_norm = norm(&params.iter().zip(&trial).map(|(a, b)| b - a).collect::<Vec<_>>());
            let rel_step = step_norm / norm(&params).max(f64::MIN_POSITIVE);
            let small_step = step_norm == 0.0 || rel_step < options.tolerance;

            match chi2_of(&trial) {
                Some(trial_chi2) if trial_chi2 <= chi2 => {
                    let old_norm = chi2.sqrt();
                    let new_norm = trial_chi2.sqrt();
                    let rel_change = if old_norm > 0.0 { (old_norm - new_norm) / old_norm } else { 0.0 };
                    params = trial;
                    chi2 = trial_chi2;
                    history.push(new_norm);
                    damping = (damping / 10.0).max(1e-300);
                    damping_history.push(damping);
                    step_accepted = true;
                    if small_step && (rel_change < options.tolerance || new_norm == 0.0) {
                        converged = true;
                    }
                    break;
                }
                _ => {
                    if small_step {
                        // no decrease is possible even for a vanishing step
                        converged = true;
                        break;
                    }
                    damping *= 10.0;
                    damping_history.push(damping);
                    if damping > 1e30 {
                        break;
                    }
                }
            }
        }
        if converged || (!step_accepted && damping > 1e30) {
            break;
        }
    }

    let jac = jacobian_fd(&model, &params, bounds, options.fd_step)?;
    let zeros = vec![0.0; n_obs];
    let (normal, _) = normal_equations(&jac, &zeros, weights);
    let dof = n_obs.saturating_sub(n_params).max(1) as f64;
    let variance = chi2 / dof;
    let std_errors = match invert(normal) {
        Some(inv) => (0..n_params).map(|i| (inv[i][i].max(0.0) * variance).sqrt()).collect(),
        None => vec![f64::INFINITY; n_params],
    };

    Ok(FitResult { params, std_errors, residual_norm: chi2.sqrt(), iterations, converged, residual_history: history })
}

/// Central finite-difference Jacobian `d prediction_i / d p_j` with relative
/// step `fd_step * |p_j|` (absolute `fd_step` when `p_j == 0`).
pub fn jacobian_fd<F>(
    model: &F,
    params: &[f64],
    bounds: Option<&[(f64, f64)]>,
    fd_step: f64,
) -> Result<Vec<Vec<f64>>, NumericsError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let base = model(params);
    let n_obs = base.len();
    let mut jac = vec![vec![0.0; params.len()]; n_obs];
    let mut probe = params.to_vec();
    for j in 0..params.len() {
        let h = if params[j] != 0.0 { fd_step * params[j].abs() } else { fd_step };
        let (lo, hi) = bounds.map(|b| b[j]).unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
        let (plus, minus) = if params[j] + h > hi {
            (params[j], params[j] - h)
        } else if params[j] - h < lo {
            (params[j] + h, params[j])
        } else {
            (params[j] + h, params[j] - h)
        };
        probe[j] = plus;
        let f_plus = model(&probe);
        probe[j] = minus;
        let f_minus = model(&probe);
        probe[j] = params[j];
        let span = plus - minus;
        for i in 0..n_obs {
            let d = (f_plus[i] - f_minus[i]) / span;
            if !d.is_finite() {
                return Err(NumericsError::NonFiniteResidual);
            }
            jac[i][j] = d;
        }
    }
    Ok(jac)
}

fn normal_equations(jac: &[Vec<f64>], residuals: &[f64], weights: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = jac.first().map_or(0, |r| r.len());
    let mut a = vec![vec![0.0; n]; n];
    let mut g = vec![0.0; n];
    for ((row, r), w) in jac.iter().zip(residuals).zip(weights) {
        for i in 0..n {
            g[i] += w * row[i] * r;
            for j in 0..n {
                a[i][j] += w * row[i] * row[j];
            }
        }
    }
    (a, g)
}

fn project(params: &[f64], delta: &[f64], bounds: Option<&[(f64, f64)]>) -> Vec<f64> {
    params
        .iter()
        .zip(delta)
        .enumerate()
        .map(|(i, (p, d))| {
            let v = p + d;
            match bounds {
                Some(b) => v.clamp(b[i].0, b[i].1),
                None => v,
            }
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting. `None` when singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() || scale == 0.0 && n > 0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= scale * 1e-15 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn invert(a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_linear(a.clone(), e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

//! Single-exponential decay and recovery fits.

use super::{DataSeries, FitError};
use crate::numerics::{nlls_fit, DataPoint, FitResult, LsqOptions};

/// Early points inside the instrument response are excluded from lifetime fits, ns.
pub const IRF_WINDOW_NS: f64 = 0.5;

/// Parameter order of [`fit_exponential_decay`].
pub const DECAY_PARAM_NAMES: [&str; 3] = ["amplitude", "time_constant", "floor"];

/// Fits `amplitude * exp(-x / time_constant) + floor`. Without a floor the
/// floor is held at zero and reported with zero uncertainty. A negative
/// amplitude describes a recovery toward the floor.
pub fn fit_exponential_decay(data: &DataSeries, with_floor: bool) -> Result<FitResult, FitError> {
    fit_exponential_decay_after(data, with_floor, f64::NEG_INFINITY)
}

/// As [`fit_exponential_decay`] using only points with `x >= x_min`.
pub fn fit_exponential_decay_after(data: &DataSeries, with_floor: bool, x_min: f64) -> Result<FitResult, FitError> {
    if data.x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FitError::InvalidInput("x must be strictly ascending".into()));
    }
    let points: Vec<DataPoint> = data.points().into_iter().filter(|p| p.x >= x_min).collect();
    let n_params = if with_floor { 3 } else { 2 };
    if points.len() < n_params {
        return Err(FitError::InsufficientData { points: points.len(), params: n_params });
    }

    let (amplitude0, tau0, floor0) = initial_guess(&points, with_floor);
    let bounds_full =
        [(f64::NEG_INFINITY, f64::INFINITY), (f64::MIN_POSITIVE, f64::INFINITY), (f64::NEG_INFINITY, f64::INFINITY)];
    let options = LsqOptions::default();
    let mut fit = if with_floor {
        let model = |p: &[f64], x: f64| p[0] * (-x / p[1]).exp() + p[2];
        nlls_fit(model, &[amplitude0, tau0, floor0], &points, Some(&bounds_full), &options)?
    } else {
        let model = |p: &[f64], x: f64| p[0] * (-x / p[1]).exp();
        let mut fit = nlls_fit(model, &[amplitude0, tau0], &points, Some(&bounds_full[..2]), &options)?;
        fit.params.push(0.0);
        fit.std_errors.push(0.0);
        fit
    };
    fit.params.truncate(3);
    Ok(fit)
}

fn initial_guess(points: &[DataPoint], with_floor: bool) -> (f64, f64, f64) {
    let n = points.len();
    let (x0, span) = (points[0].x, points[n - 1].x - points[0].x);
    let tail = (n / 10).max(1);
    let floor = if with_floor { points[n - tail..].iter().map(|p| p.y).sum::<f64>() / tail as f64 } else { 0.0 };
    let start = points[0].y - floor;
    let target = start.abs() / std::f64::consts::E;
    let tau = points
        .iter()
        .find(|p| (p.y - floor).abs() <= target)
        .map(|p| p.x - x0)
        .filter(|t| *t > 0.0)
        .unwrap_or(span / 3.0)
        .max(f64::MIN_POSITIVE);
    (start * (x0 / tau).exp(), tau, floor)
}

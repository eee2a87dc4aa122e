//! Temperature dependence of the spin lifetime.

use super::{DataSeries, FitError};
use crate::numerics::{nlls_fit, DataPoint, FitResult, LsqOptions};
use crate::units::{bose_einstein, KELVIN_PER_GHZ};

/// Phonon energy treatment in a T1 fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationEnergy {
    Fixed(f64),
    /// Free, starting from the given value in GHz.
    Free(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct T1Fit {
    /// `[gamma0 (1/ms), delta (GHz)]`; the residual norm is in `ln T1`.
    pub fit: FitResult,
    /// `h·delta/k_B`, K: slope of `ln T1` against `1/T`.
    pub activation_slope_k: f64,
}

impl T1Fit {
    pub fn gamma0(&self) -> f64 {
        self.fit.params[0]
    }

    pub fn delta_ghz(&self) -> f64 {
        self.fit.params[1]
    }
}

/// Fits `T1(T) = 1 / (gamma0 · n(delta, T))` to `(K, ms)` points in log space.
///
/// Uncertainties on T1, if present, become relative uncertainties on `ln T1`.
pub fn fit_t1_vs_temperature(points: &DataSeries, delta: ActivationEnergy) -> Result<T1Fit, FitError> {
    let (delta0, free_delta) = match delta {
        ActivationEnergy::Fixed(d) => (d, false),
        ActivationEnergy::Free(d) => (d, true),
    };
    if !(delta0 > 0.0) || !delta0.is_finite() {
        return Err(FitError::InvalidInput(format!("activation energy {delta0} GHz must be positive")));
    }
    if points.len() < 2 {
        return Err(FitError::InsufficientData { points: points.len(), params: 2 });
    }
    if points.x.iter().any(|t| !(*t > 0.0)) || points.y.iter().any(|t1| !(*t1 > 0.0)) {
        return Err(FitError::InvalidInput("temperatures and lifetimes must be positive".into()));
    }
    let data: Vec<DataPoint> =
        points.points().into_iter().map(|p| DataPoint::weighted(p.x, p.y.ln(), p.weight * p.y * p.y)).collect();

    let log_gamma0 = -data.iter().map(|p| p.y + bose_einstein(delta0, p.x).ln()).sum::<f64>() / data.len() as f64;
    let options = LsqOptions::default();
    let log_t1 = |log_g0: f64, d: f64, t: f64| -log_g0 - bose_einstein(d, t).ln();

    let mut fit = if free_delta {
        let bounds = [(f64::NEG_INFINITY, f64::INFINITY), (f64::MIN_POSITIVE, f64::INFINITY)];
        nlls_fit(|p, t| log_t1(p[0], p[1], t), &[log_gamma0, delta0], &data, Some(&bounds), &options)?
    } else {
        let mut fit = nlls_fit(|p, t| log_t1(p[0], delta0, t), &[log_gamma0], &data, None, &options)?;
        fit.params.push(delta0);
        fit.std_errors.push(0.0);
        fit
    };
    let gamma0 = fit.params[0].exp();
    fit.params[0] = gamma0;
    fit.std_errors[0] *= gamma0;
    let activation_slope_k = KELVIN_PER_GHZ * fit.params[1];
    Ok(T1Fit { fit, activation_slope_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::t1_phonon_model;

    fn synth(temps: &[f64], delta: f64, gamma0: f64) -> DataSeries {
        DataSeries::new(temps.to_vec(), temps.iter().map(|&t| t1_phonon_model(t, delta, gamma0)).collect()).unwrap()
    }

    #[test]
    fn two_points_fix_the_slope() {
        let fit = fit_t1_vs_temperature(&synth(&[3.25, 6.0], 850.0, 27_000.0), ActivationEnergy::Free(800.0)).unwrap();
        assert!((fit.activation_slope_k - 40.793_566_123_612_88).abs() < 1e-6);
        assert!((fit.gamma0() / 27_000.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_delta_recovers_gamma0() {
        let data = synth(&[3.25, 4.0, 5.0, 6.0], 850.0, 12_345.0);
        let fit = fit_t1_vs_temperature(&data, ActivationEnergy::Fixed(850.0)).unwrap();
        assert!((fit.gamma0() / 12_345.0 - 1.0).abs() < 1e-8);
        assert_eq!(fit.fit.std_errors[1], 0.0);
    }

    #[test]
    fn rejects_bad_points() {
        let data = DataSeries::new(vec![3.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert!(fit_t1_vs_temperature(&data, ActivationEnergy::Fixed(850.0)).is_err());
        let one = DataSeries::new(vec![3.0], vec![1.0]).unwrap();
        assert!(matches!(
            fit_t1_vs_temperature(&one, ActivationEnergy::Fixed(850.0)),
            Err(FitError::InsufficientData { .. })
        ));
    }
}

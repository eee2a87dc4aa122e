//! Spin-lattice relaxation through the single-phonon orbital process.

use super::DynamicsError;
use crate::units::bose_einstein;

/// `T1` in ms for a relaxation rate `gamma0 * n(delta_ghz, T)` with
/// `gamma0` in 1/ms. Infinite when the phonon mode is frozen out.
pub fn t1_phonon_model(temperature_k: f64, delta_ghz: f64, gamma0_per_ms: f64) -> f64 {
    let rate = gamma0_per_ms * bose_einstein(delta_ghz, temperature_k);
    if rate > 0.0 {
        1.0 / rate
    } else {
        f64::INFINITY
    }
}

/// Prefactor that reproduces `t1_ms` at `temperature_k`.
pub fn calibrate_gamma0(temperature_k: f64, t1_ms: f64, delta_ghz: f64) -> f64 {
    1.0 / (t1_ms * bose_einstein(delta_ghz, temperature_k))
}

/// Fluorescence ratio after a dark interval, recovering from `floor` at zero
/// delay toward 1.
pub fn t1_recovery_curve(t1_ms: f64, floor: f64, dark_times_ms: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    if !(t1_ms > 0.0) || !t1_ms.is_finite() {
        return Err(DynamicsError::InvalidInput(format!("t1 must be positive, got {t1_ms}")));
    }
    if !floor.is_finite() {
        return Err(DynamicsError::InvalidInput("floor must be finite".into()));
    }
    Ok(dark_times_ms.iter().map(|tau| 1.0 - (1.0 - floor) * (-tau / t1_ms).exp()).collect())
}

//! Physical constants and unit conversions used across the crate.

/// `h / k_B` in kelvin per gigahertz (exact SI constants).
pub const KELVIN_PER_GHZ: f64 = 6.626_070_15e-34 / 1.380_649e-23 * 1e9;

/// Free-electron spin gyromagnetic ratio `g mu_B / h` with `g = 2`, GHz/T.
pub const SPIN_GYROMAGNETIC_GHZ_PER_T: f64 = 27.99;

/// Orbital gyromagnetic ratio `mu_B / h`, GHz/T.
pub const ORBITAL_GYROMAGNETIC_GHZ_PER_T: f64 = 13.996;

/// Bose-Einstein occupation of a mode of frequency `freq_ghz` at `temperature_k`.
///
/// Returns 0 at zero temperature.
pub fn bose_einstein(freq_ghz: f64, temperature_k: f64) -> f64 {
    if temperature_k <= 0.0 {
        return 0.0;
    }
    let x = KELVIN_PER_GHZ * freq_ghz / temperature_k;
    1.0 / x.exp_m1()
}

/// Boltzmann factor `exp(-h f / k_B T)`; 0 at zero temperature for `f > 0`.
pub fn boltzmann(freq_ghz: f64, temperature_k: f64) -> f64 {
    if temperature_k <= 0.0 {
        return if freq_ghz > 0.0 { 0.0 } else { 1.0 };
    }
    (-KELVIN_PER_GHZ * freq_ghz / temperature_k).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kelvin_per_ghz_matches_codata() {
        assert!((KELVIN_PER_GHZ - 0.047_992_43).abs() < 1e-8);
    }

    #[test]
    fn occupation_of_ground_orbital_mode_at_4k() {
        // 1 / (exp(0.04799243 * 850 / 4) - 1), evaluated independently
        let n = bose_einstein(850.0, 4.0);
        assert!((n - 3.723_154_023_78e-5).abs() / 3.72e-5 < 1e-9);
    }

    #[test]
    fn frozen_bath() {
        assert_eq!(bose_einstein(850.0, 0.0), 0.0);
        assert_eq!(boltzmann(10.0, 0.0), 0.0);
        assert!(bose_einstein(850.0, 0.5) < bose_einstein(850.0, 1.0));
    }
}

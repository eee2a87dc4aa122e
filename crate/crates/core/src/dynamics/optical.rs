//! Optical coherence: driven two-level correlations and linewidth conversions.

use std::f64::consts::PI;

use super::DynamicsError;
use crate::numerics::{integrate_ode, OdeOptions};
use crate::spectra::SpectrumTrace;

/// Gaussian instrument-response width, ns (0.5 ns FWHM).
pub const DEFAULT_IRF_SIGMA_NS: f64 = 0.21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Params {
    /// Rabi angular frequency, rad/ns.
    pub rabi: f64,
    /// Excited-state decay rate, 1/ns.
    pub gamma: f64,
    /// Pure dephasing added to the coherence decay, 1/ns.
    pub extra_dephasing: f64,
    /// Gaussian IRF standard deviation, ns; 0 disables the convolution.
    pub irf_sigma: f64,
}

impl G2Params {
    fn validate(&self) -> Result<(), DynamicsError> {
        let ok = self.gamma > 0.0
            && self.rabi.is_finite()
            && self.extra_dephasing >= 0.0
            && self.irf_sigma >= 0.0
            && self.gamma.is_finite()
            && self.extra_dephasing.is_finite()
            && self.irf_sigma.is_finite();
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::InvalidInput(format!("invalid g2 parameters {self:?}")))
        }
    }

    fn coherence_decay(&self) -> f64 {
        0.5 * self.gamma + self.extra_dephasing
    }

    fn steady_population(&self) -> f64 {
        let omega2 = self.rabi * self.rabi;
        omega2 / (2.0 * self.gamma * self.coherence_decay() + 2.0 * omega2)
    }
}

/// Decay time of the Rabi-oscillation envelope, ns.
pub fn g2_envelope_time(gamma: f64, extra_dephasing: f64) -> f64 {
    1.0 / (0.75 * gamma + 0.5 * extra_dephasing)
}

/// Closed-form `g²(τ)` for resonant drive without extra dephasing; requires
/// `rabi > gamma / 4`.
pub fn g2_analytic(rabi: f64, gamma: f64, tau: f64) -> f64 {
    let mu = (rabi * rabi - gamma * gamma / 16.0).sqrt();
    let t = tau.abs();
    1.0 - (-0.75 * gamma * t).exp() * ((mu * t).cos() + 0.75 * gamma / mu * (mu * t).sin())
}

/// Normalized excited-state population after a photon detection, optionally
/// blurred by a Gaussian instrument response. Negative delays mirror positive.
pub fn g2_curve(params: &G2Params, tau_grid: &[f64]) -> Result<SpectrumTrace, DynamicsError> {
    params.validate()?;
    if tau_grid.is_empty() {
        return Err(DynamicsError::InvalidInput("empty delay grid".into()));
    }
    if tau_grid.iter().any(|t| !t.is_finite()) || tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::InvalidInput("delay grid must be finite and strictly ascending".into()));
    }
    let max_rate = params.rabi.abs() + params.gamma + params.extra_dephasing;
    let step = 0.05 / max_rate;
    let tau_max = tau_grid.iter().fold(0.0_f64, |m, t| m.max(t.abs()));

    let y: Vec<f64> = if params.irf_sigma == 0.0 {
        let mut taus: Vec<f64> = tau_grid.iter().map(|t| t.abs()).collect();
        taus.push(0.0);
        taus.sort_by(f64::total_cmp);
        // mirrored delays agree only up to rounding
        let merge = 1e-9 * (1.0 + tau_max);
        taus.dedup_by(|a, b| *a - *b <= merge);
        let values = population_ratio(params, &taus, step)?;
        tau_grid
            .iter()
            .map(|t| {
                let k = taus.partition_point(|v| *v < t.abs() - merge);
                values[k]
            })
            .collect()
    } else {
        let sigma = params.irf_sigma;
        let h = step.min(sigma / 20.0);
        let reach = 5.0 * sigma;
        let n_fine = ((tau_max + reach) / h).ceil() as usize + 2;
        let fine: Vec<f64> = (0..n_fine).map(|k| k as f64 * h).collect();
        let values = population_ratio(params, &fine, step)?;
        let sample = |t: f64| {
            let u = t.abs() / h;
            let k = (u.floor() as usize).min(n_fine - 2);
            let frac = u - k as f64;
            values[k] * (1.0 - frac) + values[k + 1] * frac
        };
        let half = (reach / h).ceil() as i64;
        let kernel: Vec<(f64, f64)> = (-half..=half)
            .map(|k| {
                let s = k as f64 * h;
                let edge = if k.abs() == half { 0.5 } else { 1.0 };
                (s, edge * (-0.5 * (s / sigma).powi(2)).exp())
            })
            .collect();
        let norm: f64 = kernel.iter().map(|(_, w)| w).sum();
        tau_grid.iter().map(|&t| kernel.iter().map(|&(s, w)| w * sample(t - s)).sum::<f64>() / norm).collect()
    };
    let y: Vec<f64> = y.into_iter().map(|v| v.max(0.0)).collect();
    SpectrumTrace::new(tau_grid.to_vec(), y).map_err(|e| DynamicsError::InvalidInput(e.to_string()))
}

/// `ρ_ee(τ) / ρ_ee(∞)` from the ground state, on an ascending grid starting at 0.
fn population_ratio(params: &G2Params, taus: &[f64], step: f64) -> Result<Vec<f64>, DynamicsError> {
    let (omega, gamma, gamma2) = (params.rabi, params.gamma, params.coherence_decay());
    let steady = params.steady_population();
    if !(steady > 0.0) {
        return Err(DynamicsError::InvalidInput("drive is zero; g2 is undefined".into()));
    }
    // state: (excited population, quadrature in phase with the drive)
    let generator = |_: f64, s: &[f64], ds: &mut [f64]| {
        ds[0] = -omega * s[1] - gamma * s[0];
        ds[1] = -0.5 * omega * (1.0 - 2.0 * s[0]) - gamma2 * s[1];
    };
    let traj = integrate_ode(generator, &[0.0, 0.0], taus, &OdeOptions { max_step: Some(step) })?;
    Ok(traj.states.iter().map(|s| s[0] / steady).collect())
}

/// Transform-limited linewidth in MHz for an excited-state lifetime in ns.
pub fn lifetime_limited_linewidth(tau_ns: f64) -> f64 {
    1000.0 / (2.0 * PI * tau_ns)
}

/// Inhomogeneous dephasing time in ns from a Lorentzian FWHM in MHz.
pub fn t2star_from_fwhm(fwhm_mhz: f64) -> f64 {
    1000.0 / (2.0 * PI * fwhm_mhz)
}

/// Lorentzian with peak height `amplitude` and full width `fwhm`.
pub fn peak_lorentzian(x: f64, center: f64, fwhm: f64, amplitude: f64) -> f64 {
    let half = 0.5 * fwhm;
    amplitude * half * half / ((x - center).powi(2) + half * half)
}

/// Sum of peak-height Lorentzians on a flat baseline.
pub fn odmr_spectrum(
    centers: &[f64],
    fwhms: &[f64],
    amplitudes: &[f64],
    baseline: f64,
    grid: &[f64],
) -> Result<SpectrumTrace, DynamicsError> {
    if centers.len() != fwhms.len() || centers.len() != amplitudes.len() {
        return Err(DynamicsError::LengthMismatch(format!(
            "{} centers, {} widths, {} amplitudes",
            centers.len(),
            fwhms.len(),
            amplitudes.len()
        )));
    }
    if fwhms.iter().any(|w| !(*w > 0.0)) {
        return Err(DynamicsError::InvalidInput("widths must be positive".into()));
    }
    let y = grid
        .iter()
        .map(|&x| {
            baseline
                + centers
                    .iter()
                    .zip(fwhms)
                    .zip(amplitudes)
                    .map(|((c, w), a)| peak_lorentzian(x, *c, *w, *a))
                    .sum::<f64>()
        })
        .collect();
    SpectrumTrace::new(grid.to_vec(), y).map_err(|e| DynamicsError::InvalidInput(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(irf: f64) -> G2Params {
        G2Params { rabi: 2.0 * PI * 0.3, gamma: 1.0 / 4.5, extra_dephasing: 0.0, irf_sigma: irf }
    }

    #[test]
    fn antibunched_at_zero_delay() {
        let grid: Vec<f64> = (0..=400).map(|k| -20.0 + 0.1 * k as f64).collect();
        let g2 = g2_curve(&params(0.0), &grid).unwrap();
        assert_eq!(g2.y[200], 0.0);
        for (t, v) in g2.x.iter().zip(&g2.y) {
            assert!((v - g2_analytic(params(0.0).rabi, 1.0 / 4.5, *t)).abs() < 1e-6);
        }
    }

    #[test]
    fn long_delay_limit() {
        let g2 = g2_curve(&params(0.0), &[0.0, 80.0]).unwrap();
        assert!((g2.y[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn irf_fills_the_dip() {
        let grid: Vec<f64> = (0..=200).map(|k| -10.0 + 0.1 * k as f64).collect();
        let g2 = g2_curve(&params(DEFAULT_IRF_SIGMA_NS), &grid).unwrap();
        let min = g2.y.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0 && min < 0.3, "{min}");
    }

    #[test]
    fn envelope_time() {
        assert!((g2_envelope_time(1.0 / 4.5, 0.0) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn linewidth_conversions() {
        assert!((lifetime_limited_linewidth(4.5) - 35.367_765).abs() < 1e-5);
        assert!((lifetime_limited_linewidth(1000.0 / (2.0 * PI)) - 1.0).abs() < 1e-12);
        assert!((t2star_from_fwhm(2.7) - 58.946_3).abs() < 1e-4);
        assert!((t2star_from_fwhm(0.293) - 543.191).abs() < 1e-3);
        assert!((t2star_from_fwhm(1.35) / t2star_from_fwhm(2.7) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn odmr_half_width() {
        let trace = odmr_spectrum(&[5.0], &[2.7], &[1.0], 0.0, &[5.0 - 1.35, 5.0, 5.0 + 1.35]).unwrap();
        assert!((trace.y[0] - 0.5).abs() < 1e-15 && (trace.y[2] - 0.5).abs() < 1e-15);
        let flat = odmr_spectrum(&[1.0, 2.0], &[0.3, 0.4], &[0.0, 0.0], 0.2, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(flat.y, vec![0.2; 3]);
        assert!(matches!(odmr_spectrum(&[1.0], &[], &[1.0], 0.0, &[0.0]), Err(DynamicsError::LengthMismatch(_))));
    }
}

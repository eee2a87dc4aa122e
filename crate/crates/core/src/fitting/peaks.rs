//! Multi-Lorentzian peak fits.

use super::{DataSeries, FitError};
use crate::dynamics::peak_lorentzian;
use crate::numerics::{nlls_fit, FitResult, LsqOptions};

/// Starting values for one peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakInit {
    pub center: f64,
    pub fwhm: f64,
    pub amplitude: f64,
}

/// Parameter names in fit order: per peak `center_k, fwhm_k, amplitude_k`,
/// then `baseline`.
pub fn lorentzian_param_names(n_peaks: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(3 * n_peaks + 1);
    for k in 0..n_peaks {
        names.push(format!("center_{k}"));
        names.push(format!("fwhm_{k}"));
        names.push(format!("amplitude_{k}"));
    }
    names.push("baseline".into());
    names
}

fn sorted_by_x(data: &DataSeries) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|&a, &b| data.x[a].total_cmp(&data.x[b]));
    (idx.iter().map(|&i| data.x[i]).collect(), idx.iter().map(|&i| data.y[i]).collect())
}

/// Picks the `n_peaks` tallest local maxima of the 3-point moving average,
/// returned in ascending center order, plus a baseline guess.
pub fn auto_initialize_peaks(data: &DataSeries, n_peaks: usize) -> Result<(Vec<PeakInit>, f64), FitError> {
    let (x, y) = sorted_by_x(data);
    let n = x.len();
    if n < 3 {
        return Err(FitError::InsufficientData { points: n, params: 3 * n_peaks + 1 });
    }
    let smooth: Vec<f64> =
        (0..n).map(|i| if i == 0 || i == n - 1 { y[i] } else { (y[i - 1] + y[i] + y[i + 1]) / 3.0 }).collect();
    let baseline = smooth.iter().copied().fold(f64::INFINITY, f64::min);

    let mut maxima: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || smooth[i] > smooth[i - 1];
            let right = i == n - 1 || smooth[i] >= smooth[i + 1];
            left && right
        })
        .collect();
    maxima.sort_by(|&a, &b| smooth[b].total_cmp(&smooth[a]).then(a.cmp(&b)));
    if maxima.len() < n_peaks {
        return Err(FitError::InvalidInput(format!("found {} local maxima, need {n_peaks}", maxima.len())));
    }
    maxima.truncate(n_peaks);
    maxima.sort_unstable();

    let min_spacing = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let peaks = maxima
        .iter()
        .map(|&i| {
            let amplitude = smooth[i] - baseline;
            let half = baseline + 0.5 * amplitude;
            let mut lo = i;
            while lo > 0 && smooth[lo] > half {
                lo -= 1;
            }
            let mut hi = i;
            while hi < n - 1 && smooth[hi] > half {
                hi += 1;
            }
            let fwhm = (x[hi] - x[lo]).max(2.0 * min_spacing);
            PeakInit { center: x[i], fwhm, amplitude: y[i] - baseline }
        })
        .collect();
    Ok((peaks, baseline))
}

/// Fits `n_peaks` peak-height Lorentzians on a flat baseline.
pub fn fit_lorentzian_multi(
    data: &DataSeries,
    n_peaks: usize,
    init: Option<&[PeakInit]>,
) -> Result<FitResult, FitError> {
    if n_peaks == 0 {
        return Err(FitError::InvalidInput("need at least one peak".into()));
    }
    let n_params = 3 * n_peaks + 1;
    if data.len() < n_params {
        return Err(FitError::InsufficientData { points: data.len(), params: n_params });
    }
    let (peaks, baseline) = match init {
        Some(p) if p.len() == n_peaks => {
            let min_y = data.y.iter().copied().fold(f64::INFINITY, f64::min);
            (p.to_vec(), min_y)
        }
        Some(p) => {
            return Err(FitError::InvalidInput(format!("{} initial peaks given for {n_peaks} peaks", p.len())));
        }
        None => auto_initialize_peaks(data, n_peaks)?,
    };
    if peaks.iter().any(|p| !(p.fwhm > 0.0)) {
        return Err(FitError::InvalidInput("initial widths must be positive".into()));
    }

    let mut params0 = Vec::with_capacity(n_params);
    let mut bounds = Vec::with_capacity(n_params);
    for p in &peaks {
        params0.extend([p.center, p.fwhm, p.amplitude]);
        bounds.extend([
            (f64::NEG_INFINITY, f64::INFINITY),
            (f64::MIN_POSITIVE, f64::INFINITY),
            (f64::NEG_INFINITY, f64::INFINITY),
        ]);
    }
    params0.push(baseline);
    bounds.push((f64::NEG_INFINITY, f64::INFINITY));

    let model = |p: &[f64], x: f64| {
        p[..3 * n_peaks].chunks_exact(3).map(|c| peak_lorentzian(x, c[0], c[1], c[2])).sum::<f64>() + p[3 * n_peaks]
    };
    Ok(nlls_fit(model, &params0, &data.points(), Some(&bounds), &LsqOptions::default())?)
}

//! Optical transitions between the excited and ground manifolds.
//!
//! Line strengths follow from squared electric-dipole matrix elements summed
//! over the three polarizations; emission is weighted by a Boltzmann
//! population of the excited manifold.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defect::{
    eigensystem_in_defect_frame, lab_to_defect_frame, spin_expectation, DefectParameters, EigenSystem, Manifold,
    ModelError,
};
use crate::numerics::{inner, ComplexMatrix};
use crate::units::KELVIN_PER_GHZ;

/// Relative strength of the axial (z) dipole component.
pub const DEFAULT_Z_DIPOLE: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("ground and excited eigensystems were built at different fields")]
    MismatchedField,
    #[error("expected a {expected:?} eigensystem")]
    WrongManifold { expected: Manifold },
    #[error("frequency grid is empty")]
    EmptyGrid,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SpectraError {
    pub fn name(&self) -> &'static str {
        match self {
            SpectraError::MismatchedField => "MismatchedField",
            SpectraError::WrongManifold { .. } => "WrongManifold",
            SpectraError::EmptyGrid => "EmptyGrid",
            SpectraError::InvalidInput(_) => "InvalidInput",
            SpectraError::Model(e) => e.name(),
        }
    }
}

/// The four zero-field line families, highest frequency first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineFamily {
    /// upper excited branch to lower ground branch
    Alpha,
    Beta,
    Gamma,
    /// lower excited branch to upper ground branch
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionLine {
    /// Excited level (A..D).
    pub from_label: String,
    /// Ground level (1..4).
    pub to_label: String,
    /// GHz, includes `zpl_offset`.
    pub freq_offset: f64,
    pub intensity: f64,
    /// `Tr(ρ_f ρ_i)` of the reduced spin states, in [0, 1].
    pub spin_overlap: f64,
    pub thermal_weight: f64,
}

impl TransitionLine {
    /// Combined label, e.g. `A1`.
    pub fn label(&self) -> String {
        format!("{}{}", self.from_label, self.to_label)
    }

    pub fn family(&self) -> LineFamily {
        let upper_excited = matches!(self.from_label.as_str(), "C" | "D");
        let upper_ground = matches!(self.to_label.as_str(), "3" | "4");
        match (upper_excited, upper_ground) {
            (true, false) => LineFamily::Alpha,
            (true, true) => LineFamily::Beta,
            (false, false) => LineFamily::Gamma,
            (false, true) => LineFamily::Delta,
        }
    }

    pub fn is_spin_conserving(&self) -> bool {
        self.spin_overlap >= 0.5
    }

    /// Emitted strength, `intensity * thermal_weight`.
    pub fn emission(&self) -> f64 {
        self.intensity * self.thermal_weight
    }
}

/// Sampled curve; `x` strictly ascending, `y` non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SpectrumTrace {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, SpectraError> {
        if x.len() != y.len() {
            return Err(SpectraError::InvalidInput(format!("{} x values but {} y values", x.len(), y.len())));
        }
        check_ascending(&x)?;
        if y.iter().any(|v| !(*v >= 0.0)) {
            return Err(SpectraError::InvalidInput("intensities must be non-negative".into()));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Trapezoidal area under the curve.
    pub fn area(&self) -> f64 {
        self.x.windows(2).zip(self.y.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
    }
}

pub(crate) fn check_ascending(x: &[f64]) -> Result<(), SpectraError> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::InvalidInput("grid contains non-finite values".into()));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectraError::InvalidInput("grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Dipole operators `(d_x, d_y, d_z)` taking excited-orbital kets to
/// ground-orbital bras; `Σ_p d_p† d_p = (2 + c²)·1`.
pub fn dipole_operators(z_strength: f64) -> [ComplexMatrix; 3] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let spin_identity = ComplexMatrix::identity(2);
    let dx = ComplexMatrix::from_rows(&[vec![one, zero], vec![zero, -one]]);
    let dy = ComplexMatrix::from_rows(&[vec![zero, -one], vec![-one, zero]]);
    let dz = ComplexMatrix::identity(2).scale(Complex64::new(z_strength, 0.0));
    [dx.kron(&spin_identity), dy.kron(&spin_identity), dz.kron(&spin_identity)]
}

/// Boltzmann populations of the levels of a manifold, summing to 1.
pub fn thermal_weights(energies: &[f64], temperature_k: f64) -> Vec<f64> {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = if temperature_k > 0.0 {
        energies.iter().map(|e| (-(e - e_min) * KELVIN_PER_GHZ / temperature_k).exp()).collect()
    } else {
        let scale = energies.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        energies.iter().map(|e| if (e - e_min).abs() <= 1e-9 * scale { 1.0 } else { 0.0 }).collect()
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Lines for every (excited i, ground f) pair using the default z dipole.
pub fn transition_table(
    gs: &EigenSystem,
    es: &EigenSystem,
    temperature_k: f64,
) -> Result<Vec<TransitionLine>, SpectraError> {
    transition_table_with(gs, es, temperature_k, DEFAULT_Z_DIPOLE)
}

pub fn transition_table_with(
    gs: &EigenSystem,
    es: &EigenSystem,
    temperature_k: f64,
    z_strength: f64,
) -> Result<Vec<TransitionLine>, SpectraError> {
    if gs.manifold != Manifold::Ground {
        return Err(SpectraError::WrongManifold { expected: Manifold::Ground });
    }
    if es.manifold != Manifold::Excited {
        return Err(SpectraError::WrongManifold { expected: Manifold::Excited });
    }
    let same_field = gs.b_defect.iter().zip(&es.b_defect).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    if !same_field {
        return Err(SpectraError::MismatchedField);
    }
    if !(temperature_k >= 0.0) {
        return Err(SpectraError::InvalidInput(format!("temperature {temperature_k} K must be non-negative")));
    }

    let dipoles = dipole_operators(z_strength);
    let weights = thermal_weights(&es.energies, temperature_k);
    let ground_spins = gs.states.iter().map(|s| spin_expectation(s)).collect::<Result<Vec<_>, _>>()?;
    let excited_spins = es.states.iter().map(|s| spin_expectation(s)).collect::<Result<Vec<_>, _>>()?;

    let mut lines = Vec::with_capacity(16);
    for i in 0..es.states.len() {
        let moved: Vec<Vec<Complex64>> = dipoles.iter().map(|d| d.mul_vec(&es.states[i])).collect();
        for f in 0..gs.states.len() {
            let intensity: f64 = moved.iter().map(|v| inner(&gs.states[f], v).norm_sqr()).sum();
            let (sf, si) = (ground_spins[f], excited_spins[i]);
            let overlap = 0.5 * (1.0 + sf[0] * si[0] + sf[1] * si[1] + sf[2] * si[2]);
            lines.push(TransitionLine {
                from_label: es.labels[i].to_string(),
                to_label: gs.labels[f].to_string(),
                freq_offset: es.energies[i] - gs.energies[f] + es.zpl_offset,
                intensity,
                spin_overlap: overlap.clamp(0.0, 1.0),
                thermal_weight: weights[i],
            });
        }
    }
    Ok(lines)
}

/// Transition table at one field magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub b_tesla: f64,
    pub lines: Vec<TransitionLine>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGeometry {
    /// Lab-frame field direction (normalized on use).
    pub direction: [f64; 3],
    /// Defect symmetry axis in the lab frame.
    pub axis: [f64; 3],
}

/// Transition tables along a field-magnitude sweep with adiabatic labels.
///
/// Labels are assigned by energy order at the first point (and after any
/// zero-field point); afterwards each level inherits the label of the
/// previous-point state it overlaps most.
pub fn field_sweep(
    p: &DefectParameters,
    magnitudes: &[f64],
    geometry: SweepGeometry,
    temperature_k: f64,
) -> Result<Vec<SweepPoint>, SpectraError> {
    field_sweep_with(p, magnitudes, geometry, temperature_k, DEFAULT_Z_DIPOLE)
}

pub fn field_sweep_with(
    p: &DefectParameters,
    magnitudes: &[f64],
    geometry: SweepGeometry,
    temperature_k: f64,
    z_strength: f64,
) -> Result<Vec<SweepPoint>, SpectraError> {
    if magnitudes.iter().any(|b| !(*b >= 0.0) || !b.is_finite()) {
        return Err(SpectraError::InvalidInput("field magnitudes must be finite and non-negative".into()));
    }
    if magnitudes.windows(2).any(|w| w[1] < w[0]) {
        return Err(SpectraError::InvalidInput("field magnitudes must be ascending".into()));
    }
    let dir_norm = geometry.direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(dir_norm > 0.0) {
        return Err(SpectraError::InvalidInput("field direction has zero length".into()));
    }
    let unit_dir = geometry.direction.map(|c| c / dir_norm);
    let unit_b = lab_to_defect_frame(unit_dir, geometry.axis)?;

    let mut out = Vec::with_capacity(magnitudes.len());
    let mut previous: Option<(EigenSystem, EigenSystem)> = None;
    for &b in magnitudes {
        let b_defect = unit_b.map(|c| c * b);
        let mut gs = eigensystem_in_defect_frame(p, Manifold::Ground, b_defect)?;
        let mut es = eigensystem_in_defect_frame(p, Manifold::Excited, b_defect)?;
        if let Some((pg, pe)) = &previous {
            if !pg.zero_field_degenerate {
                track_labels(pg, &mut gs);
            }
            if !pe.zero_field_degenerate {
                track_labels(pe, &mut es);
            }
        }
        let lines = transition_table_with(&gs, &es, temperature_k, z_strength)?;
        out.push(SweepPoint { b_tesla: b, lines });
        previous = Some((gs, es));
    }
    Ok(out)
}

/// Relabels `current` by greedy maximum overlap with `previous`; ties go to the
/// lower-energy pairing.
pub fn track_labels(previous: &EigenSystem, current: &mut EigenSystem) {
    let n = current.states.len();
    let mut overlaps = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            overlaps.push((inner(&previous.states[a], &current.states[b]).norm_sqr(), a, b));
        }
    }
    // stable sort keeps energy order among equal overlaps
    overlaps.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut taken_prev = vec![false; n];
    let mut new_labels: Vec<Option<&'static str>> = vec![None; n];
    for (_, a, b) in overlaps {
        if taken_prev[a] || new_labels[b].is_some() {
            continue;
        }
        taken_prev[a] = true;
        new_labels[b] = Some(previous.labels[a]);
    }
    current.labels = new_labels.into_iter().map(|l| l.expect("complete assignment")).collect();
}

/// Unit-area Lorentzian of full width `fwhm` centered at zero.
pub fn lorentzian(x: f64, fwhm: f64) -> f64 {
    let half = 0.5 * fwhm;
    half / std::f64::consts::PI / (x * x + half * half)
}

/// Lorentzian-broadened emission spectrum of a line list.
pub fn synthesize_spectrum(lines: &[TransitionLine], fwhm: f64, grid: &[f64]) -> Result<SpectrumTrace, SpectraError> {
    if grid.is_empty() {
        return Err(SpectraError::EmptyGrid);
    }
    if !(fwhm > 0.0) || !fwhm.is_finite() {
        return Err(SpectraError::InvalidInput(format!("fwhm must be positive, got {fwhm}")));
    }
    check_ascending(grid)?;
    let y = grid
        .iter()
        .map(|&nu| lines.iter().map(|l| l.emission() * lorentzian(nu - l.freq_offset, fwhm)).sum())
        .collect();
    SpectrumTrace::new(grid.to_vec(), y)
}

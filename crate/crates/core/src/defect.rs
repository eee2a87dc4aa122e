//! Orbital-doublet model of an inversion-symmetric group-IV defect.
//!
//! Each manifold (ground or excited) is a 4-dimensional space spanned by
//! `{e_x, e_y} ⊗ {up, down}` in the fixed order `(e_x↑, e_x↓, e_y↑, e_y↓)`.
//! Orbital operators `τ` act on the first factor and spin operators `σ` on the
//! second; both are Pauli matrices with eigenvalues ±1. The Hamiltonian is
//!
//! ```text
//! H = -(λ/2) τ_y⊗σ_z + υ_x τ_z⊗1 + υ_y τ_x⊗1 + q γ_L B_z τ_y⊗1 + (γ_S/2) 1⊗(B·σ)
//! ```
//!
//! with `B` expressed in the defect frame (z along the high-symmetry axis).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{hermitian_eigensystem, vec_norm, ComplexMatrix, NumericsError};
use crate::units::{ORBITAL_GYROMAGNETIC_GHZ_PER_T, SPIN_GYROMAGNETIC_GHZ_PER_T};

/// Zero-field splitting of the tin-vacancy ground manifold, GHz.
pub const SNV_GROUND_SPLITTING_GHZ: f64 = 850.0;
/// Zero-field splitting of the tin-vacancy excited manifold, GHz.
pub const SNV_EXCITED_SPLITTING_GHZ: f64 = 3000.0;
/// Share of the ground splitting carried by spin-orbit coupling (`λ/Δ`).
pub const SNV_GROUND_SPIN_ORBIT_FRACTION: f64 = 0.99;
/// Share of the excited splitting carried by spin-orbit coupling (`λ/Δ`).
pub const SNV_EXCITED_SPIN_ORBIT_FRACTION: f64 = 0.80;
pub const DEFAULT_QUENCH: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("symmetry axis has zero length")]
    ZeroAxis,
    #[error("state norm {norm} deviates from 1")]
    UnnormalizedState { norm: f64 },
    #[error("invalid defect parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl ModelError {
    pub fn name(&self) -> &'static str {
        match self {
            ModelError::ZeroAxis => "ZeroAxis",
            ModelError::UnnormalizedState { .. } => "UnnormalizedState",
            ModelError::InvalidParameters(_) => "InvalidParameters",
            ModelError::Numerics(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Manifold {
    Ground,
    Excited,
}

/// Physical constants of one ground/excited manifold pair. Energies in GHz,
/// gyromagnetic ratios in GHz/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectParameters {
    pub lambda_g: f64,
    pub lambda_e: f64,
    /// `(υ_x, υ_y)` Jahn-Teller plus strain, ground manifold.
    pub jt_g: [f64; 2],
    pub jt_e: [f64; 2],
    pub quench_g: f64,
    pub quench_e: f64,
    pub gamma_s: f64,
    pub gamma_l: f64,
    /// Zero-phonon-line center; 0 means frequencies are detunings.
    pub zpl_offset: f64,
}

/// The three manifold-specific constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldConstants {
    pub lambda: f64,
    pub jt: [f64; 2],
    pub quench: f64,
}

impl Default for DefectParameters {
    fn default() -> Self {
        Self::snv()
    }
}

impl DefectParameters {
    /// Unstrained tin-vacancy defaults.
    pub fn snv() -> Self {
        Self::from_splittings(
            SNV_GROUND_SPLITTING_GHZ,
            SNV_GROUND_SPIN_ORBIT_FRACTION,
            SNV_EXCITED_SPLITTING_GHZ,
            SNV_EXCITED_SPIN_ORBIT_FRACTION,
        )
    }

    /// Builds parameters whose zero-field splittings are `delta_g`, `delta_e`
    /// with spin-orbit shares `λ/Δ` given by the fractions. The remainder is
    /// put in `υ_x` so that `Δ = sqrt(λ² + 4υ²)`.
    pub fn from_splittings(delta_g: f64, fraction_g: f64, delta_e: f64, fraction_e: f64) -> Self {
        let split = |delta: f64, fraction: f64| {
            let lambda = fraction * delta;
            let upsilon = (delta * delta - lambda * lambda).max(0.0).sqrt() / 2.0;
            (lambda, upsilon)
        };
        let (lambda_g, upsilon_g) = split(delta_g, fraction_g);
        let (lambda_e, upsilon_e) = split(delta_e, fraction_e);
        Self {
            lambda_g,
            lambda_e,
            jt_g: [upsilon_g, 0.0],
            jt_e: [upsilon_e, 0.0],
            quench_g: DEFAULT_QUENCH,
            quench_e: DEFAULT_QUENCH,
            gamma_s: SPIN_GYROMAGNETIC_GHZ_PER_T,
            gamma_l: ORBITAL_GYROMAGNETIC_GHZ_PER_T,
            zpl_offset: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.lambda_g,
            self.lambda_e,
            self.jt_g[0],
            self.jt_g[1],
            self.jt_e[0],
            self.jt_e[1],
            self.quench_g,
            self.quench_e,
            self.gamma_s,
            self.gamma_l,
            self.zpl_offset,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParameters("non-finite value".into()));
        }
        if self.lambda_g <= 0.0 || self.lambda_e <= 0.0 {
            return Err(ModelError::InvalidParameters("spin-orbit couplings must be positive".into()));
        }
        for q in [self.quench_g, self.quench_e] {
            if !(0.0..=1.0).contains(&q) {
                return Err(ModelError::InvalidParameters(format!("quench factor {q} outside [0, 1]")));
            }
        }
        if self.gamma_s <= 0.0 || self.gamma_l <= 0.0 {
            return Err(ModelError::InvalidParameters("gyromagnetic ratios must be positive".into()));
        }
        Ok(())
    }

    pub fn manifold(&self, manifold: Manifold) -> ManifoldConstants {
        match manifold {
            Manifold::Ground => ManifoldConstants { lambda: self.lambda_g, jt: self.jt_g, quench: self.quench_g },
            Manifold::Excited => ManifoldConstants { lambda: self.lambda_e, jt: self.jt_e, quench: self.quench_e },
        }
    }

    /// `Δ = sqrt(λ² + 4|υ|²)`
    pub fn zero_field_splitting(&self, manifold: Manifold) -> f64 {
        let c = self.manifold(manifold);
        (c.lambda * c.lambda + 4.0 * (c.jt[0] * c.jt[0] + c.jt[1] * c.jt[1])).sqrt()
    }

    /// `λ/Δ` for the manifold.
    pub fn spin_orbit_fraction(&self, manifold: Manifold) -> f64 {
        self.manifold(manifold).lambda / self.zero_field_splitting(manifold)
    }

    pub fn jt_magnitude(&self, manifold: Manifold) -> f64 {
        let jt = self.manifold(manifold).jt;
        jt[0].hypot(jt[1])
    }
}

/// Lab-frame magnetic field plus the symmetry axis of the particular defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Tesla, crystal frame.
    pub b_lab: [f64; 3],
    /// High-symmetry axis, crystal frame. Normalized on use.
    pub axis: [f64; 3],
}

impl FieldConfig {
    pub fn new(b_lab: [f64; 3], axis: [f64; 3]) -> Self {
        Self { b_lab, axis }
    }

    /// Field of `magnitude` tesla along `direction` (normalized here).
    pub fn along(direction: [f64; 3], magnitude: f64, axis: [f64; 3]) -> Self {
        let n = norm3(direction);
        let b_lab = if n > 0.0 { direction.map(|c| c * magnitude / n) } else { [0.0; 3] };
        Self { b_lab, axis }
    }

    pub fn defect_frame(&self) -> Result<[f64; 3], ModelError> {
        lab_to_defect_frame(self.b_lab, self.axis)
    }
}

/// `[111]` symmetry axis (unnormalized).
pub const AXIS_111: [f64; 3] = [1.0, 1.0, 1.0];
/// `[001]` crystal direction.
pub const DIR_001: [f64; 3] = [0.0, 0.0, 1.0];

/// Expresses a lab-frame field in the defect frame: z along `axis`, x in the
/// plane of `axis` and `b_lab` (so the y component is zero).
pub fn lab_to_defect_frame(b_lab: [f64; 3], axis: [f64; 3]) -> Result<[f64; 3], ModelError> {
    let axis_norm = norm3(axis);
    if !(axis_norm > 0.0) || !axis_norm.is_finite() {
        return Err(ModelError::ZeroAxis);
    }
    let z_hat = axis.map(|c| c / axis_norm);
    let bz = dot3(b_lab, z_hat);
    let perp = [b_lab[0] - bz * z_hat[0], b_lab[1] - bz * z_hat[1], b_lab[2] - bz * z_hat[2]];
    // parallel field: any x works, the transverse component is zero either way
    let bx = norm3(perp);
    Ok([bx, 0.0, bz])
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
}

/// Orbital operator `op ⊗ 1`.
pub fn orbital(op: &ComplexMatrix) -> ComplexMatrix {
    op.kron(&ComplexMatrix::identity(2))
}

/// Spin operator `1 ⊗ op`.
pub fn spin(op: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(2).kron(op)
}

/// 4×4 Hamiltonian of one manifold in GHz. `b_defect` in tesla, defect frame.
pub fn build_hamiltonian(p: &DefectParameters, manifold: Manifold, b_defect: [f64; 3]) -> ComplexMatrix {
    let m = p.manifold(manifold);
    let (tx, ty, tz) = (pauli_x(), pauli_y(), pauli_z());
    let spin_orbit = ty.kron(&tz).scale(c(-m.lambda / 2.0, 0.0));
    let jahn_teller = &orbital(&tz).scale(c(m.jt[0], 0.0)) + &orbital(&tx).scale(c(m.jt[1], 0.0));
    let orbital_zeeman = orbital(&ty).scale(c(m.quench * p.gamma_l * b_defect[2], 0.0));
    let half = p.gamma_s / 2.0;
    let spin_zeeman = &(&spin(&tx).scale(c(half * b_defect[0], 0.0)) + &spin(&ty).scale(c(half * b_defect[1], 0.0)))
        + &spin(&tz).scale(c(half * b_defect[2], 0.0));
    &(&(&spin_orbit + &jahn_teller) + &orbital_zeeman) + &spin_zeeman
}

pub const GROUND_LABELS: [&str; 4] = ["1", "2", "3", "4"];
pub const EXCITED_LABELS: [&str; 4] = ["A", "B", "C", "D"];

/// Diagonalized manifold. `states[k]` belongs to `energies[k]` and carries
/// `labels[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub manifold: Manifold,
    pub energies: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub labels: Vec<&'static str>,
    /// Field used, defect frame, tesla.
    pub b_defect: [f64; 3],
    pub zpl_offset: f64,
    /// Both Kramers pairs degenerate (zero field).
    pub zero_field_degenerate: bool,
}

impl EigenSystem {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| *l == label)
    }

    pub fn energy_of(&self, label: &str) -> Option<f64> {
        self.index_of(label).map(|i| self.energies[i])
    }
}

pub fn manifold_eigensystem(
    p: &DefectParameters,
    manifold: Manifold,
    field: &FieldConfig,
) -> Result<EigenSystem, ModelError> {
    let b = field.defect_frame()?;
    eigensystem_in_defect_frame(p, manifold, b)
}

/// Same as [`manifold_eigensystem`] with the field already in the defect frame.
pub fn eigensystem_in_defect_frame(
    p: &DefectParameters,
    manifold: Manifold,
    b_defect: [f64; 3],
) -> Result<EigenSystem, ModelError> {
    p.validate()?;
    let h = build_hamiltonian(p, manifold, b_defect);
    let eig = hermitian_eigensystem(&h)?;
    let states: Vec<Vec<Complex64>> = (0..4).map(|k| eig.vector(k)).collect();
    let labels = match manifold {
        Manifold::Ground => GROUND_LABELS.to_vec(),
        Manifold::Excited => EXCITED_LABELS.to_vec(),
    };
    let e = &eig.values;
    let scale = e.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let degenerate = (e[1] - e[0]).abs() <= 1e-9 * scale && (e[3] - e[2]).abs() <= 1e-9 * scale;
    Ok(EigenSystem {
        manifold,
        energies: eig.values,
        states,
        labels,
        b_defect,
        zpl_offset: p.zpl_offset,
        zero_field_degenerate: degenerate,
    })
}

/// `(<σ_x>, <σ_y>, <σ_z>)` of a normalized manifold state.
pub fn spin_expectation(state: &[Complex64]) -> Result<[f64; 3], ModelError> {
    if state.len() != 4 {
        return Err(ModelError::InvalidParameters(format!("state has {} components, expected 4", state.len())));
    }
    let norm = vec_norm(state);
    if (norm - 1.0).abs() > 1e-6 {
        return Err(ModelError::UnnormalizedState { norm });
    }
    // basis index = 2 * orbital + spin, spin 0 = up
    let mut s = [0.0; 3];
    for orb in 0..2 {
        let up = state[2 * orb];
        let down = state[2 * orb + 1];
        let cross = up.conj() * down;
        s[0] += 2.0 * cross.re;
        s[1] += 2.0 * cross.im;
        s[2] += up.norm_sqr() - down.norm_sqr();
    }
    Ok(s)
}

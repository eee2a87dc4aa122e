//! Parameter extraction from spectra, decays, relaxation data and
//! field-dependent line positions.

mod decay;
mod field;
mod peaks;
mod thermal;

use thiserror::Error;

use crate::defect::ModelError;
use crate::numerics::{DataPoint, NumericsError};

pub use decay::{fit_exponential_decay, fit_exponential_decay_after, DECAY_PARAM_NAMES, IRF_WINDOW_NS};
pub use field::{
    fit_field_dependence, predicted_lines, FieldFit, FieldFitOptions, FieldObservation, FreeMask, FIELD_PARAM_NAMES,
};
pub use peaks::{auto_initialize_peaks, fit_lorentzian_multi, lorentzian_param_names, PeakInit};
pub use thermal::{fit_t1_vs_temperature, ActivationEnergy, T1Fit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("{points} data points cannot determine {params} parameters")]
    InsufficientData { points: usize, params: usize },
    #[error("fit diverged: {0}")]
    FitDiverged(NumericsError),
    #[error(
        "observed lines at {b_tesla} T ({first} and {second} GHz) both map to the predicted line at {predicted} GHz"
    )]
    AssignmentAmbiguous { b_tesla: f64, first: f64, second: f64, predicted: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl FitError {
    pub fn name(&self) -> &'static str {
        match self {
            FitError::InsufficientData { .. } => "InsufficientData",
            FitError::FitDiverged(_) => "FitDiverged",
            FitError::AssignmentAmbiguous { .. } => "AssignmentAmbiguous",
            FitError::InvalidInput(_) => "InvalidInput",
            FitError::Model(e) => e.name(),
        }
    }
}

impl From<NumericsError> for FitError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::InsufficientData { points, params } => FitError::InsufficientData { points, params },
            NumericsError::InvalidInput(msg) => FitError::InvalidInput(msg),
            other => FitError::FitDiverged(other),
        }
    }
}

/// Paired samples with optional one-sigma uncertainties on `y`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub y_err: Option<Vec<f64>>,
}

impl DataSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, FitError> {
        Self::with_errors(x, y, None)
    }

    pub fn with_errors(x: Vec<f64>, y: Vec<f64>, y_err: Option<Vec<f64>>) -> Result<Self, FitError> {
        if x.len() != y.len() {
            return Err(FitError::InvalidInput(format!("{} x values but {} y values", x.len(), y.len())));
        }
        if let Some(err) = &y_err {
            if err.len() != x.len() {
                return Err(FitError::InvalidInput(format!("{} values but {} uncertainties", x.len(), err.len())));
            }
            if err.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
                return Err(FitError::InvalidInput("uncertainties must be positive and finite".into()));
            }
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(FitError::InvalidInput("data contain non-finite values".into()));
        }
        Ok(Self { x, y, y_err })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Points weighted by `1/σ²`, or unit weights without uncertainties.
    pub fn points(&self) -> Vec<DataPoint> {
        (0..self.len())
            .map(|i| {
                let w = self.y_err.as_ref().map_or(1.0, |e| 1.0 / (e[i] * e[i]));
                DataPoint::weighted(self.x[i], self.y[i], w)
            })
            .collect()
    }
}

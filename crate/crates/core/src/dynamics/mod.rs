//! Time-domain observables: optical spin pumping, phonon-limited spin
//! relaxation, resonantly driven photon correlations and ODMR lineshapes.

mod optical;
mod pumping;
mod relaxation;

use thiserror::Error;

use crate::numerics::NumericsError;

pub use optical::{
    g2_analytic, g2_curve, g2_envelope_time, lifetime_limited_linewidth, odmr_spectrum, peak_lorentzian,
    t2star_from_fwhm, G2Params, DEFAULT_IRF_SIGMA_NS,
};
pub use pumping::{build_pumping_model, pumping_trace, PumpingConfig, PumpingResult, RateModel, DEFAULT_PUMP_FIELD_T};
pub use relaxation::{calibrate_gamma0, t1_phonon_model, t1_recovery_curve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("line {0} is not part of the pumping model")]
    UnknownLine(String),
    #[error("list lengths differ: {0}")]
    LengthMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl DynamicsError {
    pub fn name(&self) -> &'static str {
        match self {
            DynamicsError::UnknownLine(_) => "UnknownLine",
            DynamicsError::LengthMismatch(_) => "LengthMismatch",
            DynamicsError::InvalidInput(_) => "InvalidInput",
            DynamicsError::Numerics(e) => e.name(),
        }
    }
}

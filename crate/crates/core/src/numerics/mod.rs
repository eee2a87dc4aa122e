//! Numerical kernels: Hermitian eigendecomposition, damped nonlinear least
//! squares and fixed-step ODE integration. Nothing in here knows about the
//! defect physics.

mod eigen;
mod lsq;
mod matrix;
mod ode;

use thiserror::Error;

pub use eigen::{hermitian_eigensystem, HermitianEigen, HERMITIAN_TOLERANCE, MAX_DIM, MIN_DIM};
pub use lsq::{jacobian_fd, nlls_fit, nlls_fit_vector, solve_linear, DataPoint, FitResult, LsqOptions};
pub use matrix::{inner, vec_norm, ComplexMatrix};
pub use ode::{integrate_ode, OdeOptions, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, norm {norm:.3e})")]
    NotHermitian { deviation: f64, norm: f64 },
    #[error("matrix dimension {dim} outside supported range {min}..={max}")]
    DimensionOutOfRange { dim: usize, min: usize, max: usize },
    #[error("Jacobi sweeps did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("normal equations singular for every damping tried (last damping {:.1e})", damping_history.last().copied().unwrap_or(f64::NAN))]
    SingularNormalEquations { damping_history: Vec<f64> },
    #[error("{points} data points cannot determine {params} parameters")]
    InsufficientData { points: usize, params: usize },
    #[error("model produced a non-finite residual")]
    NonFiniteResidual,
    #[error("ODE state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl NumericsError {
    /// Stable identifier for reporting.
    pub fn name(&self) -> &'static str {
        match self {
            NumericsError::NotHermitian { .. } => "NotHermitian",
            NumericsError::DimensionOutOfRange { .. } => "DimensionOutOfRange",
            NumericsError::NoConvergence { .. } => "NoConvergence",
            NumericsError::SingularNormalEquations { .. } => "SingularNormalEquations",
            NumericsError::InsufficientData { .. } => "InsufficientData",
            NumericsError::NonFiniteResidual => "NonFiniteResidual",
            NumericsError::NonFiniteState { .. } => "NonFiniteState",
            NumericsError::InvalidInput(_) => "InvalidInput",
        }
    }
}

use thiserror::Error;

use crate::iqfi::QfiSpectrum;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("times out of order at index {index}: {prev} > {next}")]
    Ordering { index: usize, prev: f64, next: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("integrator step underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("norm drift {drift:e} exceeds the allowed {allowed:e}")]
    NormDrift { drift: f64, allowed: f64 },

    #[error("finite-difference step too large: Richardson levels disagree by {disagreement:e}")]
    FiniteDifferenceStep { disagreement: f64 },

    #[error("quadrature did not converge within {panels} panels (K ≈ {}, error ≈ {:e})", .partial.integral, .partial.error_estimate)]
    NonConvergence {
        panels: usize,
        partial: Box<QfiSpectrum>,
    },

    #[error("Monte Carlo average {mean} has standard error {std_error:e} above target")]
    MonteCarlo { mean: f64, std_error: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

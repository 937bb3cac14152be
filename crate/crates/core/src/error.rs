use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// reported verbatim by the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field covers [0, {extent}] but the weight support needs [0, {required}]")]
    InsufficientCoverage { extent: f64, required: f64 },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("initial moment {z0} is not below the minimum point {g_plusplus} of the phase function")]
    MomentAboveMinimum { z0: f64, g_plusplus: f64 },

    #[error("ODE step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("ODE integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("solver breakdown at t = {t}: {reason}")]
    SolverBreakdown { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

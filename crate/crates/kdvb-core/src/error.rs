//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("integration constant c0 = {c0} must exceed -lambda^2/(2 beta) = {bound}")]
    InvalidIntegrationConstant { c0: f64, bound: f64 },

    #[error("complex equilibria: discriminant c3^2 + 4 c0 c2 = {discriminant} < 0")]
    ComplexEquilibria { discriminant: f64 },

    #[error("the exponential frame transform requires alpha > 0; use the Hamiltonian path for alpha = 0")]
    TransformUndefined,

    #[error("({u}, {v}) is not a singular point of the travelling-wave system")]
    NotSingularPoint { u: f64, v: f64 },

    #[error("sample {index}: y = 0, reciprocal frame undefined")]
    ZeroSample { index: usize },

    #[error("sigma = -2 (zero wave speed): the power-series tail degenerates, use the zero-speed tail")]
    SigmaDegenerate,

    #[error("sigma = {sigma} outside the admissible range (-5/2, -2)")]
    SigmaOutOfRange { sigma: f64 },

    #[error("outside the asymptotic regime: first correction exceeds half the leading term; minimal admissible zeta = {min_zeta:.6}")]
    OutsideAsymptoticRegime { min_zeta: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("step size underflow at t = {t} (last good state {state:?})")]
    StepSizeUnderflow { t: f64, state: Vec<f64> },

    #[error("exceeded {max_steps} steps at t = {t} (last good state {state:?})")]
    MaxStepsExceeded {
        t: f64,
        max_steps: usize,
        state: Vec<f64>,
    },

    #[error("sign change inside the fit window")]
    SignChangeInWindow,

    #[error("profile does not extend far enough for a settled left state")]
    InsufficientExtent,

    #[error("field contains non-finite values at t = {time}")]
    NonFiniteField { time: f64 },

    #[error("run aborted at t = {time}: {reason}")]
    AbortedRun { time: f64, reason: String },

    #[error("level crossing not found or not unique in the interior")]
    CrossingNotFound,
}

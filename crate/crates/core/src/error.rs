use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate detuning: {0}")]
    DegenerateDetuning(String),

    #[error("resonator loss must be positive, got gamma_a = {0}")]
    NonPositiveResonatorLoss(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("closed-form eigenvalues fail the residual check (residual {residual:e}, bound {bound:e})")]
    ResidualCheckFailed { residual: f64, bound: f64 },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("no unique steady state: decay rates differ by only {0:e} MHz")]
    DegenerateDecay(f64),

    #[error("slow modes are ambiguous: qubit-subspace overlap {0:.3} < 0.5")]
    SlowModeAmbiguity(f64),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

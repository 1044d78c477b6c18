use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A distribution produced non-finite or inconsistent values.
    #[error("model error: {0}")]
    Model(String),
    /// The requested quantity is only defined for other fading/attack models.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// No feasible point exists. `min_budget` is the smallest average power
    /// per block that would make the program feasible, when known.
    #[error("infeasible: {reason}")]
    Infeasible { reason: String, min_budget: Option<f64> },
    #[error("copula calibration failed: target lag correlation {target}, best achievable {achieved}")]
    Calibration { target: f64, achieved: f64 },
    #[error("out of regime: {0}")]
    OutOfRegime(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedModel(msg.into())
    }
}

use thiserror::Error;

pub type Result<T, E = QramError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QramError {
    /// Two support labels were sent to the same image.
    #[error("label map is not injective on the state support: two terms collide on {label}")]
    Collision { label: String },

    #[error("label map factor {factor} does not have unit modulus")]
    UnitarityViolation { factor: String },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("non-finite amplitude on {label}")]
    NonFinite { label: String },

    #[error("state has empty support")]
    EmptySupport,

    #[error("protocol error in {step}: {detail}")]
    Protocol { step: String, detail: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl QramError {
    pub(crate) fn protocol(step: impl Into<String>, detail: impl Into<String>) -> Self {
        QramError::Protocol {
            step: step.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn config(detail: impl Into<String>) -> Self {
        QramError::Config(detail.into())
    }
}

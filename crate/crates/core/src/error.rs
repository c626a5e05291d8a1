use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violates an operation's precondition.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("element {element} is outside the window [0, {window})")]
    OutOfWindow { element: usize, window: usize },

    /// A serialized artifact is well-formed JSON but semantically inconsistent.
    #[error("format error: {0}")]
    Format(String),

    /// A verifier was asked to certify a run that is too short.
    #[error("insufficient horizon: {what} needs at least {required} stages, run has {actual}")]
    InsufficientHorizon {
        what: String,
        required: u64,
        actual: u64,
    },

    #[error("unsupported query: {0}")]
    Unsupported(String),

    /// An internal invariant of a construction failed. Never expected.
    #[error("construction invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    /// True when the error stems from bad input rather than a refuted invariant.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}

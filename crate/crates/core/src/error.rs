use thiserror::Error;

/// Errors raised across the solver stack.
///
/// Variants are grouped by who is at fault: the caller's inputs
/// (`Domain`, `Config`, `Contract`, `Precondition`) or the numerics
/// (`Numeric`, `Singular`, `Measurement`). The CLI maps the first group to
/// exit code 2 and the second to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("evaluation error in `{node}`: {message}")]
    Eval { node: String, message: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Contract(_) | Error::Precondition(_) => 2,
            Error::Parse { .. }
            | Error::Eval { .. }
            | Error::Numeric(_)
            | Error::Singular(_)
            | Error::Measurement(_)
            | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

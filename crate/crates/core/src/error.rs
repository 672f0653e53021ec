use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A point fell outside the domain [0, 1].
    #[error("point {0} outside the domain [0, 1]")]
    OutOfDomain(f64),

    /// A parameter value outside the supported range (e.g. p <= 1, alpha < 1).
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// The iteration produced a non-finite quantity.
    #[error("numerical failure at iteration {iteration}: {message}")]
    NumericalFailure { iteration: usize, message: String },

    /// The certificate's slope margin is not positive, so no bound can be issued.
    #[error("degenerate certificate: {0}")]
    DegenerateCertificate(String),

    /// A configuration file or set of CLI options could not be used.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

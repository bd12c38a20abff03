use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |A - A^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dispersive reduction is singular: qubit {qubit} has zero detuning")]
    SingularDetuning { qubit: usize },

    #[error("protocol precondition violated: {0}")]
    Protocol(String),

    #[error("integration failed at t = {t:e} (step {step:e}): {reason}")]
    Integration { t: f64, step: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::SingularDetuning { .. } => "singular_detuning",
            Error::Protocol(_) => "protocol",
            Error::Integration { .. } => "integration",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Rejected scattering-function parameters.
    #[error("invalid model: {0}")]
    Model(String),

    #[error("pole proximity at zeta = {re}{im:+}i: |sinh b + sinh zeta| = {distance:e} < {floor:e}")]
    Pole {
        re: f64,
        im: f64,
        distance: f64,
        floor: f64,
    },

    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Tensor rank or grid mismatch.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("cap exceeded: {0}")]
    Cap(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("exponent overflow: {0}")]
    Overflow(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable kind used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Model(_) => "model",
            Error::Pole { .. } => "pole",
            Error::Domain(_) => "domain",
            Error::Shape(_) => "shape",
            Error::Cap(_) => "cap",
            Error::Support(_) => "support",
            Error::Overflow(_) => "overflow",
            Error::NonConvergence(_) => "non_convergence",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

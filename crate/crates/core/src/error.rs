use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{0} is outside the domain [0, 1]")]
    Domain(f64),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("capacity exceeded: {worlds:.3e} possible worlds (limit {limit:.0e})")]
    Capacity { worlds: f64, limit: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

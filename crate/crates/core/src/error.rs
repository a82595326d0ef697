use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid rate: {0}")]
    InvalidRate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Alternating binomial sums lose precision combinatorially past this size.
    #[error("user count {count} exceeds the supported maximum of {max}")]
    TooManyUsers { count: u32, max: u32 },

    #[error("at least {min} Monte Carlo trials are required, got {got}")]
    TooFewTrials { got: u64, min: u64 },

    #[error("network {0} is silent in the requested power mode")]
    InactiveNetwork(u8),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

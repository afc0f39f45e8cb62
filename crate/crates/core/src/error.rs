use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rational needs {bits} bits, above the configured cap of {cap}")]
    BitCap { bits: u64, cap: u64 },

    #[error("point {0} is not covered by any piece or override")]
    Uncovered(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate probability vector: {0}")]
    Degenerate(String),

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

impl Error {
    /// Resource-type failures: the request was valid but too large to run
    /// exactly under the configured limits.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::BitCap { .. } | Error::Budget(_) | Error::NonConvergence(_)
        )
    }
}

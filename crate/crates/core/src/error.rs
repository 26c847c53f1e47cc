use thiserror::Error;

/// Errors produced while validating parameters or evaluating key rates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A time-accounting denominator is zero or negative.
    #[error("infeasible time accounting: {expression} = {value} <= 0")]
    NonPositiveEffectiveTime {
        expression: &'static str,
        value: f64,
    },

    #[error("covariance matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("covariance matrix is singular (determinant {determinant:e})")]
    SingularCovariance { determinant: f64 },

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("mutual information evaluated to {0:e} bits/symbol, below the numerical floor")]
    NegativeMutualInformation(f64),

    #[error("closed form requires a symmetric configuration: {0}")]
    AsymmetricParams(String),

    #[error("degenerate correlation |rho| = 1: high-SNR limit is unbounded")]
    DegenerateCorrelation,

    #[error("pilot window of {length} symbols rounds to zero")]
    ZeroLengthWindow { length: f64 },

    #[error("length mismatch: {pilots} pilots vs {received} received samples")]
    LengthMismatch { pilots: usize, received: usize },

    #[error("pilot sequence has zero energy")]
    ZeroPilotEnergy,

    #[error("sample covariance is singular or not positive definite")]
    SingularSampleCovariance,

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Output(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Output(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Output(err.to_string())
    }
}

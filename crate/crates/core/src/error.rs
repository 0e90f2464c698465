use thiserror::Error;

/// Everything that can go wrong across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("drifts must be strictly positive (got mu1 = {mu1}, mu2 = {mu2})")]
    NonPositiveDrift { mu1: f64, mu2: f64 },

    #[error("correlation must lie in [-1, 1] (got {0})")]
    InvalidCorrelation(f64),

    #[error("times must be strictly positive (got t = {t}, s = {s})")]
    NonPositiveTime { t: f64, s: f64 },

    #[error("covariance is degenerate: {0}")]
    DegenerateCovariance(String),

    #[error("singular covariance matrix (determinant {0:e})")]
    SingularCovariance(f64),

    #[error("operation `{op}` is not defined for regime {regime}")]
    UnsupportedRegime { op: &'static str, regime: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("quadrature failed: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { error: f64, tolerance: f64 },

    #[error("exponential weights must be positive (got c = ({0}, {1}))")]
    DegenerateWeights(f64, f64),

    #[error("formula carries the constant H~ symbolically; supply an estimate to get a point value")]
    MissingConstant,

    #[error("insufficient signal: relative standard error {rel_stderr:.3} at u = {u}")]
    InsufficientSignal { u: f64, rel_stderr: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Process exit code for the command-line front end: 2 for bad input,
    /// 4 for numeric failures. Verification failures (code 3) are not errors
    /// and are decided by the commands themselves.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPositiveDrift { .. }
            | Error::InvalidCorrelation(_)
            | Error::NonPositiveTime { .. }
            | Error::UnsupportedRegime { .. }
            | Error::MissingConstant
            | Error::InvalidInput(_) => 2,
            Error::DegenerateCovariance(_)
            | Error::SingularCovariance(_)
            | Error::NoConvergence(_)
            | Error::QuadratureFailure { .. }
            | Error::DegenerateWeights(..)
            | Error::InsufficientSignal { .. } => 4,
        }
    }

    /// Variant name, used as the machine-readable error tag in JSON output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveDrift { .. } => "NonPositiveDrift",
            Error::InvalidCorrelation(_) => "InvalidCorrelation",
            Error::NonPositiveTime { .. } => "NonPositiveTime",
            Error::DegenerateCovariance(_) => "DegenerateCovariance",
            Error::SingularCovariance(_) => "SingularCovariance",
            Error::UnsupportedRegime { .. } => "UnsupportedRegime",
            Error::NoConvergence(_) => "NoConvergence",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::DegenerateWeights(..) => "DegenerateWeights",
            Error::MissingConstant => "MissingConstant",
            Error::InsufficientSignal { .. } => "InsufficientSignal",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

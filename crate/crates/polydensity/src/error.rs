use thiserror::Error;

/// Crate-wide error type. Variant names follow the failure they signal.
#[derive(Debug, Error)]
pub enum Error {
    #[error("integration range [{a}, {b}] not contained in piece interval [{lo}, {hi})")]
    IntervalOutOfRange { a: f64, b: f64, lo: f64, hi: f64 },

    #[error("ambient intervals differ: [{0}, {1}) vs [{2}, {3})")]
    DomainMismatch(f64, f64, f64, f64),

    #[error("adaptive quadrature did not converge within {0} node evaluations")]
    QuadratureNonConvergence(usize),

    #[error("piecewise polynomial is not flagged as a distribution")]
    NotADistribution,

    #[error("mixture weights invalid: {0}")]
    WeightsInvalid(String),

    #[error("empty sample")]
    EmptySample,

    #[error("conditional sampler exceeded {0} consecutive rejections; excluded mass is too large")]
    ExcludedMassTooLarge(usize),

    #[error("LP precondition violated: sqrt(eps*z)*eta = {lhs} > eps/2 = {rhs}")]
    PreconditionViolated { lhs: f64, rhs: f64 },

    #[error("LP infeasible")]
    LpInfeasible,

    #[error("LP iteration limit reached")]
    LpIterationLimit,

    #[error("DP oracle limit: s = {0} exceeds exhaustive enumeration bound {1}")]
    TooLargeForOracle(usize, usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("density is not log-concave: {0}")]
    NotLogConcaveDetected(String),

    #[error("generated pmf failed its class validator: {0}")]
    ValidationFailed(String),

    #[error("target is degenerate: {0}")]
    TargetDegenerate(String),

    #[error("configuration error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

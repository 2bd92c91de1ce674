use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("model is not stationary: {0}")]
    NonStationary(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("period {larger} is not a multiple of period {smaller}")]
    NotDivisor { larger: usize, smaller: usize },

    #[error("bandwidth m={m} makes bands overlap for n={n}, s'={s_prime} (need 2*m*s' < n)")]
    BandOverlap { m: usize, n: usize, s_prime: usize },

    #[error("bandwidth m={0} is too small for the regression (need m >= 2)")]
    BandwidthTooSmall(usize),

    #[error("zero periodogram ordinate at Fourier index {0}")]
    ZeroOrdinate(usize),

    #[error("regressors are collinear: {0}")]
    RankDeficient(String),

    #[error("autocovariance is not positive definite: partial correlation {value} at lag {lag}")]
    NotPositiveDefinite { lag: usize, value: f64 },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("optimizer did not converge after {0} iterations")]
    NotConverged(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used on the command line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid-spec",
            Error::NonStationary(_) => "non-stationary",
            Error::NonFinite(_) => "non-finite",
            Error::TooShort { .. } => "too-short",
            Error::NotDivisor { .. } => "s2-not-divisor",
            Error::BandOverlap { .. } => "band-overlap",
            Error::BandwidthTooSmall(_) => "bandwidth-too-small",
            Error::ZeroOrdinate(_) => "zero-ordinate",
            Error::RankDeficient(_) => "rank-deficient",
            Error::NotPositiveDefinite { .. } => "not-positive-definite",
            Error::Quadrature(_) => "quadrature",
            Error::NotConverged(_) => "not-converged",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Parse(_) => "malformed-input",
            Error::Io(_) => "io",
            Error::Json(_) => "malformed-json",
        }
    }

    /// Numeric failures (as opposed to invalid input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotConverged(_)
                | Error::NotPositiveDefinite { .. }
                | Error::Quadrature(_)
                | Error::RankDeficient(_)
                | Error::ZeroOrdinate(_)
        )
    }
}

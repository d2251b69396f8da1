use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("generator id {0} is outside 1..=64")]
    InvalidGenerator(u32),
    #[error("generator {0} appears twice in one index")]
    DuplicateGenerator(u32),
    #[error("element is not invertible: |body| = {body_abs:e} <= {epsilon:e}")]
    NotInvertible { body_abs: f64, epsilon: f64 },
    #[error("operator matrices are limited to 12 generators, got {0}")]
    DimensionTooLarge(u32),
    #[error("weight growth rate {xi} does not exceed ln(2)/(2d) = {threshold} for d = {d}; the weight sum diverges")]
    BoundDiverges { xi: f64, d: u32, threshold: f64 },
    #[error("norm orders must satisfy p > q, got p = {p}, q = {q}")]
    InvalidOrder { p: i32, q: i32 },
    #[error("|body| = {body_abs} must be below R / C_2 = {limit} for the series to converge")]
    ConvergencePreconditionFailed { body_abs: f64, limit: f64 },
    #[error("power series did not settle within {cap} terms")]
    CapExceeded { cap: usize },
    #[error("quadrature self-test deviates by {deviation:e} (tolerance {tolerance:e})")]
    QuadratureUnderResolved { deviation: f64, tolerance: f64 },
    #[error("time {t} lies outside the model window [-{t_max}, {t_max}]")]
    GridExceeded { t: f64, t_max: f64 },
    #[error("element touches generator {generator}, beyond the process truncation {limit}")]
    TruncationOverflow { generator: u32, limit: u32 },
    #[error("kernel integral diverges: {0}")]
    IntegralDiverges(String),
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("invalid weight system: {0}")]
    InvalidWeights(String),
    #[error("invalid spectral density: {0}")]
    InvalidDensity(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed element: {0}")]
    Format(String),
}

impl Error {
    /// Variant name, used by the CLI when reporting which precondition failed.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::DuplicateGenerator(_) => "DuplicateGenerator",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::BoundDiverges { .. } => "BoundDiverges",
            Error::InvalidOrder { .. } => "InvalidOrder",
            Error::ConvergencePreconditionFailed { .. } => "ConvergencePreconditionFailed",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::QuadratureUnderResolved { .. } => "QuadratureUnderResolved",
            Error::GridExceeded { .. } => "GridExceeded",
            Error::TruncationOverflow { .. } => "TruncationOverflow",
            Error::IntegralDiverges(_) => "IntegralDiverges",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Format(_) => "Format",
        }
    }
}

use thiserror::Error;

/// Failures raised by the manifold, chart, disk and layer operations.
///
/// Every operation validates its domain and fails here instead of clamping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    /// Input lies outside the parameter domain (theta2 >= 0, sigma <= 0, x <= 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The (P, Q) chart is undefined at theta1 = 0 (equivalently mu = 0) or P = 0.
    #[error("chart singularity: {0}")]
    ChartSingularity(String),
    /// Phase coordinates with Q * P^2 <= 1 have no preimage with theta2 < 0.
    #[error("outside chart image: Q*P^2 = {0} must exceed 1")]
    OutsideChartImage(f64),
    /// Caller-supplied argument is malformed (non-finite, non-positive step, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// |alpha|^2 - |xi|^2 deviates from 1.
    #[error("invalid SU(1,1) element: |alpha|^2 - |xi|^2 = {0}")]
    InvalidElement(f64),
    #[error("numerical singularity: {0}")]
    NumericalSingularity(String),
    /// An internal identity failed to hold at run time.
    #[error("consistency check failed: {what} (residual {residual:e})")]
    Consistency { what: &'static str, residual: f64 },
}

pub type Result<T> = std::result::Result<T, GeoError>;

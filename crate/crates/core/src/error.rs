use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("operands have mismatched dimensions ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("exponential overflowed after {squarings} squarings (scale 2^{scale})")]
    ExponentialOverflow { scale: u32, squarings: u32 },

    #[error("invalid tolerance {0}")]
    InvalidTolerance(f64),

    #[error("Gaussian factor does not decay: Re(s^2) = {re_s2}")]
    NonNormalizable { re_s2: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(&'static str),

    #[error("integrand is not finite at alpha = {at}")]
    NonFiniteIntegrand { at: Complex64 },

    #[error("normalization <u, v> = {found}, expected 1")]
    Normalization { found: Complex64 },

    #[error("alpha = -1 makes T singular")]
    SingularDeformation,

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("truncation unsafe: {0}")]
    TruncationUnsafe(String),

    #[error("series stalled after {terms} terms (last term norm {last_term_norm:e})")]
    SeriesStalled { terms: usize, last_term_norm: f64 },

    #[error("series diverges: |lambda_b| = {lambda_b_abs} outside estimated radius (tanh(rho)/2 = {limit})")]
    SeriesDivergent { lambda_b_abs: f64, limit: f64 },

    #[error("metric series does not converge: summand norm {summand_norm:e} at n = {n}")]
    MetricDivergent { n: usize, summand_norm: f64 },

    #[error("operation not available for model '{model}': {what}")]
    Capability { model: String, what: &'static str },

    #[error("state not normalized in metric inner product: <x, eta x> = {measured}")]
    NotNormalized { measured: Complex64 },

    #[error("degenerate radius specification: atanh argument {0}")]
    DegenerateSpec(f64),

    #[error("ratio test inconclusive at k = {k}")]
    Inconclusive { k: usize, trace: Vec<f64> },

    #[error("ODE step size underflow at t = {t} (h = {h:e})")]
    IntegrationFailure { t: f64, h: f64 },

    #[error("representation mismatch: {0}")]
    RepresentationMismatch(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

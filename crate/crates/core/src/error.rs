use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("argument must be strictly positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("degree {k} is outside the summation range for order {s} (requires k > {abs_s})", abs_s = s.abs())]
    ExcludedIndex { s: f64, k: usize },

    #[error("quadrature did not converge: achieved relative error estimate {estimate:.3e}")]
    Quadrature { estimate: f64 },

    #[error("series truncation cap of {cap} terms exceeded (|lambda| = {modulus})")]
    TruncationCap { cap: usize, modulus: f64 },

    #[error("integrability violated for multi-index of degree {degree}: n + |gamma| - alpha/2 = {margin} <= 0")]
    Integrability { degree: usize, margin: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty sample set")]
    EmptyGrid,

    #[error("ensemble member {0} has zero norm")]
    ZeroNorm(usize),

    #[error("bound shape is not positive at sample {index} (value {value})")]
    NonPositiveShape { index: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::TruncationCap { .. } | Error::NonPositiveShape { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid jump law: {0}")]
    InvalidLaw(String),

    #[error("size guard: n = {n} exceeds the configured cap {cap}")]
    SizeGuard { n: usize, cap: usize },

    #[error("floating-point overflow guard: k_max * ln(n_max) = {0:.1} > 700")]
    OverflowGuard(f64),

    #[error("law has infinite mean; {0} requires a finite-mean law")]
    InfiniteMean(&'static str),

    #[error("law is outside the regime of {0}")]
    OutsideRegime(&'static str),

    #[error("replicate exceeded the iteration cap of {0} proposals")]
    IterationCap(u64),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("root bracketing failed: {0}")]
    Bisection(String),

    #[error("statistical test rejected its input: {0}")]
    Statistic(String),

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

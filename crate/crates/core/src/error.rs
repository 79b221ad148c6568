use thiserror::Error;

/// Errors produced by the numerical core and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Shape mismatch (non-square input, incompatible lengths, mixed `M`).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// NaN or infinite entries where finite values are required.
    #[error("domain error: {0}")]
    NonFinite(String),

    /// A matrix required to be positive semi-definite is not.
    #[error(
        "matrix is not positive semi-definite: eigenvalue {min_eigenvalue:e} \
         below threshold {threshold:e}"
    )]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    /// Out-of-range scalar parameter (angular spread, gamma, drop count, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Experiment configuration rejected during validation.
    #[error("config error: {0}")]
    Config(String),

    /// A computation produced a non-finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// I/O failure while reading configs or writing results.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

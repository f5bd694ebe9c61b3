//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid subsystem dimensions: {0}")]
    InvalidDims(String),

    #[error("partial trace requires a nonempty keep set")]
    EmptyKeepSet,

    #[error("generator index ({p},{q}) out of range for dimension {dim}")]
    GeneratorIndexOutOfRange { p: usize, q: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state validation failed: {0}")]
    InvalidState(String),

    #[error("malformed state file: {0}")]
    MalformedFile(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error(
        "spectral contract violated: eigenvalue imaginary part {max_imag:.3e} exceeds {tol:.3e}"
    )]
    SpectralContract { max_imag: f64, tol: f64 },

    #[error("rank contract violated: fifth-largest eigenvalue {value:.3e} exceeds {tol:.3e}")]
    RankContract { value: f64, tol: f64 },

    #[error("normalization convention error: {0}")]
    NormalizationConvention(String),

    #[error("detector is not monotone over the prescan grid:\n{0}")]
    NonMonotone(String),

    #[error("detector has no sign change on [0,1]: {0}")]
    NoSignChange(String),

    #[error("unknown property tag: {0}")]
    UnknownProperty(String),

    #[error("eigenvalue solver failed to converge")]
    EigenFailed,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    ///
    /// 2 = detector/property failure, 3 = input error, 4 = numerical
    /// contract violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonMonotone(_) | Error::NoSignChange(_) => 2,
            Error::SpectralContract { .. }
            | Error::RankContract { .. }
            | Error::NormalizationConvention(_)
            | Error::EigenFailed => 4,
            _ => 3,
        }
    }
}

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("multi-index {b:?} is not componentwise below {a:?}")]
    IndexNotBelow { a: Vec<u32>, b: Vec<u32> },

    #[error("derivative order {order} exceeds the accuracy guard {max}")]
    DerivativeOrder { order: u32, max: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite sample at flat index {index}")]
    NonFinite { index: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operation requires an analytic (atom expansion) state: {0}")]
    NotAnalytic(&'static str),

    #[error("reference wavefunction is not unit norm (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("Wigner function has imaginary residue {residue:e} above {tolerance:e}")]
    NonRealWigner { residue: f64, tolerance: f64 },

    #[error("Husimi function dips to {min:e}, below {tolerance:e}; grid truncation suspected")]
    NegativeHusimi { min: f64, tolerance: f64 },

    #[error("grid resolution error in {what}: disagreement {residual:e} above {tolerance:e}")]
    GridResolution {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("grid too coarse: value {coarse} changed to {refined} under N -> 2N")]
    GridTooCoarse { coarse: f64, refined: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

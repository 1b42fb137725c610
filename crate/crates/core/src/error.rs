use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid of {nx} points is too small for kmax = {kmax} (need at least {required})")]
    GridTooSmall {
        nx: usize,
        kmax: usize,
        required: usize,
    },

    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("Picard iteration diverged at iterate {iteration}: norm {norm:e} exceeds {threshold:e}; reduce delta")]
    PicardDivergence {
        iteration: usize,
        norm: f64,
        threshold: f64,
    },

    #[error("resonant parameters: 3*beta/(5*alpha) = k1^2 + k2^2 + k1*k2 for (k1, k2) = ({}, {})", .witness.0, .witness.1)]
    Resonant { witness: (i64, i64) },

    #[error("vanishing denominator at frequencies {indices:?}")]
    VanishingDenominator { indices: Vec<i64> },

    #[error("time {t} is outside the sampled range [{start}, {end}] or off the sample grid")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    #[error("no finite absorbing time: {0}")]
    NoAbsorbingTime(String),

    #[error("parameter {name} = {value} has no exact rational key")]
    NoExactKey { name: &'static str, value: f64 },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("zero denominator in ratio: {0}")]
    ZeroDenominator(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

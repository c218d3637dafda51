use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector norm {norm} is not 1 within tolerance")]
    NotUnit { norm: f64 },

    #[error("cannot normalize a zero or non-finite vector")]
    Degenerate,

    #[error("state norm {norm} is not 1 within tolerance")]
    NotNormalized { norm: f64 },

    #[error("{name} = {value} is outside its domain [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("setting index {index} out of range for {count} settings")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario with {total} settings exceeds the enumeration limit of {limit}")]
    ScenarioTooLarge { total: usize, limit: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("correlator table has no entry for ({0}, {1})")]
    MissingEntry(usize, usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample count must be at least 1")]
    NoSamples,

    /// A computed quantity violated an internal invariant beyond rounding.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

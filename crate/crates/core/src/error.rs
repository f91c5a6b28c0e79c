use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("standard error undefined with {n} observation(s); need at least 2")]
    DegenerateSe { n: usize },

    #[error(
        "correlation undefined: a column has zero variance \
         (sigma1 = {sigma1}, sigma0 = {sigma0}, cov = {cov})"
    )]
    DegenerateVariance { sigma1: f64, sigma0: f64, cov: f64 },

    #[error("effective sample size is unbounded: paired variance is zero")]
    DegenerateDenominator,

    #[error("all paired differences are identical; t statistic undefined")]
    DegenerateDifferences,

    #[error("all paired differences are zero")]
    AllZeroDifferences,

    #[error("perfect correlation (rho = {rho}); p-value is 0")]
    PerfectCorrelation { rho: f64 },

    #[error("need at least {needed} seeds, have {available}")]
    TooFewSeeds { needed: usize, available: usize },

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("probability must lie in (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("standard error must be positive, got {0}")]
    NonpositiveSe(f64),

    #[error("run count must be a positive even integer, got {0}")]
    OddRunCount(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("grid infeasible: {0}")]
    GridInfeasible(String),

    #[error("invalid subsampling configuration: {0}")]
    InvalidConfig(String),

    #[error("full-sample effect is exactly zero; sign reference undefined")]
    SignReferenceUndefined,

    #[error("invalid simulator spec: {0}")]
    InvalidSpec(String),

    #[error("malformed input at {location}: {message}")]
    MalformedInput { location: String, message: String },

    #[error("duplicate record (seed {seed:?}, regime {regime}, metric {metric:?}) at {location}")]
    DuplicateRecord {
        seed: String,
        regime: u8,
        metric: String,
        location: String,
    },

    #[error("non-finite value at {location}")]
    NonFiniteValue { location: String },

    #[error("orphan seeds present in only one regime: {0:?}")]
    OrphanSeeds(Vec<String>),

    #[error("unknown metric {0:?}")]
    UnknownMetric(String),

    #[error("no paired seeds remain for metric {0:?}")]
    EmptyAfterPairing(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

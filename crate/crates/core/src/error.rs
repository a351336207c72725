use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,
    #[error("observation {index} is {value}, outside [0, 1]")]
    ObservationOutOfRange { index: usize, value: f64 },
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("bet {bet} is not admissible for a {kind} process")]
    InvalidBet { bet: f64, kind: &'static str },
    #[error("round {t} is past the horizon n = {n}")]
    PastHorizon { t: usize, n: usize },
    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("hypothesized mean must lie in [0, 1], got {0}")]
    InvalidMean(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("observation {index} is {value}; binomial methods require values in {{0, 1}}")]
    NotBinary { index: usize, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown method `{name}`; available: {available}")]
    UnknownMethod { name: String, available: String },
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidDelta(delta))
    }
}

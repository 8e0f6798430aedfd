use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("intersection of linear forms is empty")]
    EmptyFlat,
    #[error("constructible functions live on different stratifications")]
    PosetMismatch,
    #[error("invalid stratification: {0}")]
    InvalidPoset(String),
    #[error("invalid Euler obstruction table: {0}")]
    InvalidEulerTable(String),
    #[error("missing Chern-Mather class for stratum {0}")]
    MissingMather(String),
    #[error("missing conormal completion class for stratum {0}")]
    MissingCompletion(String),
    #[error("missing Morse data for stratum {0}")]
    MissingMorse(String),
    #[error("non-linear input: {0}")]
    NonLinear(String),
    #[error("bundle ring class is not in normal form: {0}")]
    NormalForm(String),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("invalid linear map: {0}")]
    InvalidMap(String),
    #[error("non-characteristic hypothesis fails: {0}")]
    Characteristic(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

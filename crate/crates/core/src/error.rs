use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative count {0} in contingency table")]
    NegativeCount(i64),
    #[error("contingency table is empty (n = 0)")]
    EmptyTable,
    #[error("scale factors must be positive integers")]
    NonPositiveScale,
    #[error("invalid table literal `{0}`: expected `n_xy,n_xny,n_nxy,n_nxny`")]
    TableLiteral(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("measure {0} requires a rule context")]
    MissingContext(u8),
    #[error("partitions cover different ids")]
    IdMismatch,
    #[error("value {value} outside the domain of {property}")]
    OutOfDomain { property: String, value: u8 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no usable baskets in transaction source")]
    NoBaskets,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

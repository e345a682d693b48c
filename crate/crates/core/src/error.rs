use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary")]
    NotUnitary,

    #[error("matrix is not a valid channel representation: {0}")]
    MalformedChannel(String),

    #[error(
        "coset database exceeded memory cap at level {level}: {bytes} bytes ({entries} entries)"
    )]
    DatabaseTooLarge {
        level: usize,
        entries: usize,
        bytes: usize,
    },

    #[error("search frontier exceeded cap of {cap} nodes ({size} requested)")]
    FrontierOverflow { cap: usize, size: usize },

    #[error("heuristic found no decomposition up to depth {m_cap}")]
    Inconclusive { m_cap: usize, overflowed: bool },

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("database file: {0}")]
    Database(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

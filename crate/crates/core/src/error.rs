use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(char),

    #[error("symbol {symbol:?} is not in the alphabet {alphabet:?}")]
    UnknownSymbol { symbol: char, alphabet: String },

    #[error("color {color} is outside an alphabet of {size} colors")]
    ColorOutOfRange { color: usize, size: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what}: {value} exceeds {limit}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("lengths {q_len} + {v_len} and edit distance {distance} are not a valid triple")]
    ParityViolation {
        q_len: usize,
        v_len: usize,
        distance: usize,
    },

    #[error("harmonic number of order {0} is undefined for n = 0")]
    EmptyHarmonic(f64),

    #[error("inconsistent oracle responses: {0}")]
    Inconsistent(String),

    #[error("variation model violated: {0}")]
    ModelViolation(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid 3DM instance: {0}")]
    InvalidInstance(String),

    #[error("search space of {space} candidates exceeds the limit {limit}")]
    SearchTooLarge { space: u128, limit: u128 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("record {record:?} (line {line}) contains symbol {symbol:?} outside the alphabet")]
    InvalidRecord {
        record: String,
        line: usize,
        symbol: char,
    },

    #[error("duplicate record identifier {0:?}")]
    DuplicateRecord(String),

    #[error("{0}")]
    Io(String),

    #[error("infeasible synthetic corpus: {0}")]
    Infeasible(String),

    #[error("sequence {id:?}: {message}")]
    Recovery { id: String, message: String },
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

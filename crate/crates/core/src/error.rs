use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: GF(2^{left}) vs GF(2^{right})")]
    FieldMismatch { left: u8, right: u8 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A level count `what`·n is not an integer for the given n.
    #[error("{what} is not an integer number of levels at n={n}; scale n and k by {multiplier}")]
    NonIntegral {
        what: String,
        n: usize,
        multiplier: u64,
    },

    #[error("field GF(2^{degree}) too small for a ({len}, {dim}) MDS code")]
    FieldTooSmall { degree: u8, len: usize, dim: usize },

    #[error("corner {corner} is not achievable at alpha={alpha}")]
    RegimeMismatch { corner: String, alpha: String },

    #[error("no verifier-certified construction for {0} after the retry budget")]
    ConstructionFailed(String),

    #[error("search space too large: {0}")]
    SearchTooLarge(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

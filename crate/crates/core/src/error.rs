use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdlError {
    #[error("empty input has no doubling code")]
    EmptyInput,

    #[error("malformed code: {0}")]
    MalformedCode(String),

    #[error("symbol {symbol} has zero probability")]
    ZeroProbability { symbol: usize },

    #[error("model assigns probability zero to the observed bit at position {position}")]
    InfiniteCost { position: usize },

    #[error("no hypothesis with finite data cost within budget")]
    NoFeasibleHypothesis,

    #[error("no sufficient statistic within tolerance {tolerance}")]
    NoSufficientStatistic { tolerance: f64 },

    #[error("class `{0}` has no decodable data coder")]
    NotDecodable(String),

    #[error("conditional undefined: prefix has mixture probability zero")]
    UndefinedConditional,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, MdlError>;

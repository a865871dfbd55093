use idealmdl::MdlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Config(#[from] toml::de::Error),
    #[error(transparent)]
    Core(#[from] MdlError),
}

impl CliError {
    /// 2 when no hypothesis satisfies the request, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(MdlError::NoFeasibleHypothesis | MdlError::NoSufficientStatistic { .. }) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

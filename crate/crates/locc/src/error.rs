use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] locc_core::Error),
    #[error("no protocol available: {0}")]
    NoProtocol(String),
    #[error("invalid argument: {0}")]
    Usage(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

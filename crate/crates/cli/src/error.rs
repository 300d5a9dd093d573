use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("error: {0}")]
    Usage(String),

    #[error("error: {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("error: {0}")]
    Core(#[from] ast_ucb::Error),

    #[error("error: thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for command-line misuse, 1 for runtime failures, 0 for `--help`/`--version`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

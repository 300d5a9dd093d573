use thiserror::Error;

/// Errors raised by policy math, scenario validation and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("confidence radius needs at least one pull, got 0")]
    ZeroPulls,

    #[error("episode pulls ({episode}) exceed total pulls ({total})")]
    EpisodeExceedsTotal { episode: u64, total: u64 },

    #[error("arm index {arm} out of range for {num_arms} arms")]
    ArmOutOfRange { arm: usize, num_arms: usize },

    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("arm {0} has not been pulled in the current episode")]
    ArmNotInitialized(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

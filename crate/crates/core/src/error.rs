use thiserror::Error;

/// Errors surfaced by the POMDP core, the planner and the reference evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("illegal action {action}: model has {count} actions")]
    IllegalAction { action: usize, count: usize },

    /// No particle consistent with the observations could be produced within
    /// the attempt budget.
    #[error("particle deprivation after {attempts} attempts")]
    ParticleDeprivation { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

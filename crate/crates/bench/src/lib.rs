//! Experiment harness: runs planners on the domains over budget sweeps and
//! reports per-point summaries.

pub mod config;
pub mod domain;
pub mod episode;
pub mod error;
pub mod oracle_checks;
pub mod output;
pub mod stats;
pub mod sweep;

pub use config::{Experiment, RunOptions};
pub use domain::{DomainKind, DomainSetup};
pub use episode::{episode_rngs, run_episode, EpisodeRecord, EpisodeSettings};
pub use error::{BenchError, Result};
pub use stats::Summary;
pub use sweep::{run_point, run_sweep, PointResult};

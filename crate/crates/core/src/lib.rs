//! Online POMDP planning for active goal recognition.
//!
//! The observer (a planning robot) and the target (a worker driven by its
//! own stochastic policy) share one flat state. Domains implement
//! [`GenerativeModel`]; the [`planner`] searches over action/observation
//! histories with particle beliefs, and [`oracle`] provides exact evaluators
//! for checking it on problems small enough to enumerate.

pub mod belief;
pub mod error;
pub mod oracle;
pub mod planner;
pub mod pomdp;
pub mod target;

pub use belief::{reset_belief, update_belief, ParticleBelief, DEFAULT_PARTICLES};
pub use error::{Error, Result};
pub use planner::{plan, Planner, PlannerConfig, PlannerMode};
pub use pomdp::{append_history, discounted_return, ActionId, GenerativeModel, History, Observation, StepOutcome};
pub use target::{count_satisfied_goals, ActivityTriple, GoalCondition, TargetModel, TargetStep};

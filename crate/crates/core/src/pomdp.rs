//! The generative POMDP contract shared by planners and domains.
//!
//! A domain never exposes transition or observation tables. It only has to
//! sample: given a state and an observer action, draw the successor state,
//! the observation and the combined observer + target reward. Everything the
//! planner and the belief filter need is built on top of [`GenerativeModel`].

use std::fmt::{self, Debug};
use std::hash::Hash;

use rand::Rng;

use crate::error::{Error, Result};

/// Index into a domain's observer action list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// An observation is either a non-target reading (sensor readings, signals
/// produced by the observer's own actions) or a target activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observation<P, T> {
    NonTarget(P),
    Target(T),
}

impl<P, T> Observation<P, T> {
    pub fn as_target(&self) -> Option<&T> {
        match self {
            Observation::Target(t) => Some(t),
            Observation::NonTarget(_) => None,
        }
    }

    pub fn as_non_target(&self) -> Option<&P> {
        match self {
            Observation::NonTarget(p) => Some(p),
            Observation::Target(_) => None,
        }
    }
}

/// Ordered action/observation pairs `(a_0, o_1, ..., a_{t-1}, o_t)`.
///
/// Histories only grow. [`History::appended`] returns a new history and
/// leaves the receiver untouched; [`History::push`] is the in-place variant
/// used by owners that do not need the old value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct History<O> {
    entries: Vec<(ActionId, O)>,
}

impl<O> Default for History<O> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<O: Clone> History<O> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn appended(&self, action: ActionId, observation: O) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len() + 1);
        entries.extend_from_slice(&self.entries);
        entries.push((action, observation));
        Self { entries }
    }

    pub fn push(&mut self, action: ActionId, observation: O) {
        self.entries.push((action, observation));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(ActionId, O)] {
        &self.entries
    }

    pub fn last(&self) -> Option<&(ActionId, O)> {
        self.entries.last()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(ActionId, O)> {
        self.entries.iter()
    }
}

/// Convenience free function mirroring [`History::appended`].
pub fn append_history<O: Clone>(history: &History<O>, action: ActionId, observation: O) -> History<O> {
    history.appended(action, observation)
}

/// Result of one generative draw.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S, O> {
    pub next_state: S,
    pub observation: O,
    /// Observer reward plus whatever the target produced during the step.
    pub reward: f64,
    pub terminal: bool,
}

/// Generative model of a joint observer + target POMDP.
///
/// `step` must be a pure function of `(state, action, rng stream)`; states
/// are values, so stepping a copy never touches the original.
pub trait GenerativeModel: Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;
    type Obs: Clone + Eq + Hash + Debug + Send + Sync;
    /// Pre-digested form of the real history that particles are validated
    /// against. Domains without hard observation facts use `()`.
    type Constraints: Send + Sync;

    fn action_count(&self) -> usize;

    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::State;

    /// Draw one transition. `action` must be below [`Self::action_count`];
    /// see [`Self::checked_step`] for the validating entry point.
    fn step<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        action: ActionId,
        rng: &mut R,
    ) -> StepOutcome<Self::State, Self::Obs>;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Partial goal satisfaction score of a state. Zero for domains without
    /// goal points.
    fn pgs_points(&self, _state: &Self::State) -> f64 {
        0.0
    }

    fn compile_constraints(&self, history: &History<Self::Obs>) -> Self::Constraints;

    fn is_consistent(&self, _state: &Self::State, _constraints: &Self::Constraints) -> bool {
        true
    }

    /// Random revitalizing variation of a particle, validated against the
    /// constraints. `None` means the variation was rejected (or the domain
    /// has no variations).
    fn transform_particle<R: Rng + ?Sized>(
        &self,
        _state: &Self::State,
        _rng: &mut R,
        _constraints: &Self::Constraints,
    ) -> Option<Self::State> {
        None
    }

    fn action_name(&self, action: ActionId) -> String {
        action.to_string()
    }

    fn checked_step<R: Rng + ?Sized>(
        &self,
        state: &Self::State,
        action: ActionId,
        rng: &mut R,
    ) -> Result<StepOutcome<Self::State, Self::Obs>> {
        let count = self.action_count();
        if action.index() >= count {
            return Err(Error::IllegalAction { action: action.index(), count });
        }
        if self.is_terminal(state) {
            return Err(Error::invalid("step from a terminal state"));
        }
        Ok(self.step(state, action, rng))
    }
}

/// `sum_k gamma^k * rewards[k]`.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
    }
    // Horner from the back keeps the recursion law exact.
    Ok(rewards.iter().rev().fold(0.0, |acc, r| r + gamma * acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discounted_return_examples() {
        assert_eq!(discounted_return(&[], 0.95).unwrap(), 0.0);
        assert_eq!(discounted_return(&[1.0, 1.0, 1.0], 1.0).unwrap(), 3.0);
        assert!((discounted_return(&[-0.5, 5.0], 0.95).unwrap() - 4.25).abs() < 1e-12);
    }

    #[test]
    fn discounted_return_rejects_bad_gamma() {
        assert!(matches!(discounted_return(&[1.0], 1.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(discounted_return(&[1.0], -0.1), Err(Error::InvalidArgument(_))));
        assert!(discounted_return(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn append_history_is_persistent() {
        let empty: History<u8> = History::new();
        let one = append_history(&empty, ActionId(0), 1);
        assert!(empty.is_empty());
        assert_eq!(one.entries(), &[(ActionId(0), 1)]);

        let three = one.appended(ActionId(1), 2).appended(ActionId(2), 3);
        let four = three.appended(ActionId(0), 4);
        assert_eq!(three.len(), 3);
        assert_eq!(four.len(), 4);
        assert_eq!(four.last(), Some(&(ActionId(0), 4)));
    }

    #[test]
    fn append_order_matters() {
        let h: History<u8> = History::new();
        let ab = h.appended(ActionId(0), 1).appended(ActionId(1), 2);
        let ba = h.appended(ActionId(1), 2).appended(ActionId(0), 1);
        assert_ne!(ab, ba);
    }
}

//! The observed agent: an independent stochastic process over its own
//! variables that emits activity triples and target rewards.

use std::fmt;

use rand::Rng;

/// Target activity `<action, object, result>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivityTriple<A, O, R> {
    pub action: A,
    pub object: O,
    pub result: R,
}

impl<A, O, R> ActivityTriple<A, O, R> {
    pub const fn new(action: A, object: O, result: R) -> Self {
        Self { action, object, result }
    }
}

impl<A: fmt::Debug, O: fmt::Debug, R: fmt::Debug> fmt::Display for ActivityTriple<A, O, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, {:?}, {:?}>", self.action, self.object, self.result)
    }
}

/// Outcome of advancing the target once.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetStep<S, T> {
    pub state: S,
    pub activity: T,
    pub reward: f64,
}

/// Named predicate over full domain states.
pub struct GoalCondition<S> {
    pub name: &'static str,
    pub predicate: fn(&S) -> bool,
}

impl<S> GoalCondition<S> {
    pub fn holds(&self, state: &S) -> bool {
        (self.predicate)(state)
    }
}

impl<S> Clone for GoalCondition<S> {
    fn clone(&self) -> Self {
        Self { name: self.name, predicate: self.predicate }
    }
}

impl<S> fmt::Debug for GoalCondition<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GoalCondition").field("name", &self.name).finish()
    }
}

/// Target policy. `advance` may only write target variables and the shared
/// resources the target consumes; it never reads the observer's pending
/// action.
pub trait TargetModel {
    type State;
    type Activity;

    fn advance<R: Rng + ?Sized>(&self, state: &Self::State, rng: &mut R) -> TargetStep<Self::State, Self::Activity>;

    fn goal_conditions(&self) -> Vec<GoalCondition<Self::State>>;
}

pub fn count_satisfied_goals<S>(state: &S, goals: &[GoalCondition<S>]) -> usize {
    goals.iter().filter(|g| g.holds(state)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even(x: &i32) -> bool {
        x % 2 == 0
    }

    fn positive(x: &i32) -> bool {
        *x > 0
    }

    #[test]
    fn counts_true_predicates() {
        let goals = vec![
            GoalCondition { name: "even", predicate: even },
            GoalCondition { name: "positive", predicate: positive },
        ];
        assert_eq!(count_satisfied_goals(&4, &goals), 2);
        assert_eq!(count_satisfied_goals(&-4, &goals), 1);
        assert_eq!(count_satisfied_goals(&-3, &goals), 0);
        assert_eq!(count_satisfied_goals(&-3, &goals[..0]), 0);
    }

    #[test]
    fn adding_a_satisfied_goal_increments_the_count() {
        let mut goals = vec![GoalCondition { name: "even", predicate: even }];
        let before = count_satisfied_goals(&2, &goals);
        goals.push(GoalCondition { name: "positive", predicate: positive });
        assert_eq!(count_satisfied_goals(&2, &goals), before + 1);
    }
}

//! Online anytime planning: POMCP-style Monte-Carlo tree search over
//! action/observation histories, with an optional goal-points
//! (PGS) mode that shapes simulated rewards with a point potential and rolls
//! out greedily on points.

mod tree;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::belief::ParticleBelief;
use crate::error::{Error, Result};
use crate::pomdp::{ActionId, GenerativeModel};

pub use tree::{ActionRecord, NodeId, SearchNode, SearchTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerMode {
    /// Uniform random rollouts, unshaped rewards.
    Pomcp,
    /// Shaped tree rewards and greedy-on-points rollouts.
    Pgs,
}

impl fmt::Display for PlannerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlannerMode::Pomcp => "pomcp",
            PlannerMode::Pgs => "pgs",
        })
    }
}

impl FromStr for PlannerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pomcp" => Ok(PlannerMode::Pomcp),
            "pgs" => Ok(PlannerMode::Pgs),
            other => Err(Error::invalid(format!("unknown planner '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub num_simulations: usize,
    pub ucb_c: f64,
    pub gamma: f64,
    pub max_depth: usize,
    /// Scale of the point potential in PGS mode.
    pub alpha: f64,
    pub mode: PlannerMode,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { num_simulations: 1024, ucb_c: 5.0, gamma: 0.95, max_depth: 100, alpha: 10.0, mode: PlannerMode::Pomcp }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_simulations < 1 {
            return Err(Error::invalid("num_simulations must be at least 1"));
        }
        if self.max_depth < 1 {
            return Err(Error::invalid("max_depth must be at least 1"));
        }
        if self.ucb_c.is_nan() || self.ucb_c < 0.0 {
            return Err(Error::invalid(format!("ucb_c {} must be non-negative", self.ucb_c)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        Ok(())
    }
}

/// Potential-based shaping term `gamma * alpha * after - alpha * before`.
#[inline]
pub fn shaping_bonus(points_before: f64, points_after: f64, gamma: f64, alpha: f64) -> f64 {
    gamma * (alpha * points_after) - alpha * points_before
}

/// UCB1 action choice. Untried actions come first (uniformly among them);
/// otherwise maximize `Q + c * sqrt(ln N / n_a)` with uniform tie-breaking.
pub fn ucb1_select<S, O: PartialEq, R: Rng + ?Sized>(node: &SearchNode<S, O>, c: f64, rng: &mut R) -> ActionId {
    let records = node.records();
    let untried = records.iter().filter(|r| r.visits == 0).count();
    if untried > 0 {
        let pick = rng.random_range(0..untried);
        let index = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.visits == 0)
            .nth(pick)
            .map(|(i, _)| i)
            .expect("pick is below the untried count");
        return ActionId(index);
    }
    let log_n = (node.visits().max(1) as f64).ln();
    argmax_uniform(records.iter().map(|r| r.value + c * (log_n / r.visits as f64).sqrt()), rng)
        .map(ActionId)
        .expect("node has at least one action")
}

/// Index of the largest value, uniform among exact ties.
fn argmax_uniform<R: Rng + ?Sized>(values: impl Iterator<Item = f64>, rng: &mut R) -> Option<usize> {
    let mut best = None;
    let mut best_value = f64::NEG_INFINITY;
    let mut ties = 0u32;
    for (i, v) in values.enumerate() {
        if best.is_none() || v > best_value {
            best = Some(i);
            best_value = v;
            ties = 1;
        } else if v == best_value {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = Some(i);
            }
        }
    }
    best
}

/// Greedy PGS rollout choice: sample one successor per action, score it with
/// the model's points and pick uniformly among the best.
pub fn pgs_rollout_action<M: GenerativeModel, R: Rng + ?Sized>(model: &M, state: &M::State, rng: &mut R) -> ActionId {
    let n = model.action_count();
    let mut scores = Vec::with_capacity(n);
    for a in 0..n {
        let outcome = model.step(state, ActionId(a), rng);
        scores.push(model.pgs_points(&outcome.next_state));
    }
    ActionId(argmax_uniform(scores.into_iter(), rng).expect("model has at least one action"))
}

/// Simulate from `state` (already `depth` steps below the search root) until
/// `max_depth` or a terminal state. Returns the discounted sum of raw,
/// unshaped rewards.
pub fn rollout<M: GenerativeModel, R: Rng + ?Sized>(
    model: &M,
    state: &M::State,
    depth: usize,
    config: &PlannerConfig,
    rng: &mut R,
) -> f64 {
    if depth >= config.max_depth || model.is_terminal(state) {
        return 0.0;
    }
    let n = model.action_count();
    let mut total = 0.0;
    let mut discount = 1.0;
    let mut current = state.clone();
    for _ in depth..config.max_depth {
        let action = match config.mode {
            PlannerMode::Pomcp => ActionId(rng.random_range(0..n)),
            PlannerMode::Pgs => pgs_rollout_action(model, &current, rng),
        };
        let outcome = model.step(&current, action, rng);
        total += discount * outcome.reward;
        if outcome.terminal {
            break;
        }
        discount *= config.gamma;
        current = outcome.next_state;
    }
    total
}

/// Search tree plus configuration. The tree survives between real steps:
/// [`Planner::advance`] adopts the subtree of the executed action and the
/// received observation.
pub struct Planner<M: GenerativeModel> {
    config: PlannerConfig,
    action_count: usize,
    tree: SearchTree<M::State, M::Obs>,
}

impl<M: GenerativeModel> Planner<M> {
    pub fn new(model: &M, config: PlannerConfig) -> Result<Self> {
        config.validate()?;
        let action_count = model.action_count();
        if action_count == 0 {
            return Err(Error::invalid("model has no actions"));
        }
        Ok(Self { config, action_count, tree: SearchTree::new(action_count) })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.config
    }

    pub fn tree(&self) -> &SearchTree<M::State, M::Obs> {
        &self.tree
    }

    pub fn root(&self) -> &SearchNode<M::State, M::Obs> {
        self.tree.node(self.tree.root())
    }

    /// Run `num_simulations` simulations and return the greedy root action.
    pub fn plan<R: Rng + ?Sized>(
        &mut self,
        model: &M,
        belief: &ParticleBelief<M::State>,
        rng: &mut R,
    ) -> Result<ActionId> {
        self.search(model, belief, self.config.num_simulations, rng)?;
        Ok(self.best_action(rng).expect("at least one simulation ran"))
    }

    pub fn search<R: Rng + ?Sized>(
        &mut self,
        model: &M,
        belief: &ParticleBelief<M::State>,
        simulations: usize,
        rng: &mut R,
    ) -> Result<()> {
        if belief.is_empty() {
            return Err(Error::invalid("cannot plan from an empty belief"));
        }
        let root = self.tree.root();
        for _ in 0..simulations {
            let state = belief.sample(rng).clone();
            self.simulate(model, &state, root, 0, rng);
        }
        Ok(())
    }

    /// Greedy root action over tried actions, uniform among ties. `None`
    /// before the first simulation.
    pub fn best_action<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ActionId> {
        let root = self.root();
        argmax_uniform(root.records().iter().map(|r| if r.visits == 0 { f64::NEG_INFINITY } else { r.value }), rng)
            .filter(|&i| root.records()[i].visits > 0)
            .map(ActionId)
    }

    /// One simulation from `state` at `node`, `depth` steps below the root.
    pub fn simulate<R: Rng + ?Sized>(
        &mut self,
        model: &M,
        state: &M::State,
        node: NodeId,
        depth: usize,
        rng: &mut R,
    ) -> f64 {
        if depth >= self.config.max_depth {
            return 0.0;
        }
        let action = ucb1_select(self.tree.node(node), self.config.ucb_c, rng);
        let outcome = model.step(state, action, rng);
        let mut reward = outcome.reward;
        if self.config.mode == PlannerMode::Pgs {
            reward += shaping_bonus(
                model.pgs_points(state),
                model.pgs_points(&outcome.next_state),
                self.config.gamma,
                self.config.alpha,
            );
        }

        let total = if outcome.terminal {
            reward
        } else {
            let existing = self.tree.node(node).child(action.index(), &outcome.observation);
            match existing {
                Some(child) => {
                    self.tree.node_mut(child).push_particle(outcome.next_state.clone());
                    let tail = self.simulate(model, &outcome.next_state, child, depth + 1, rng);
                    reward + self.config.gamma * tail
                }
                None => {
                    let child = self.tree.add_child(node, action.index(), outcome.observation);
                    self.tree.node_mut(child).push_particle(outcome.next_state.clone());
                    let tail = rollout(model, &outcome.next_state, depth + 1, &self.config, rng);
                    reward + self.config.gamma * tail
                }
            }
        };
        self.tree.node_mut(node).backup(action.index(), total);
        total
    }

    /// Adopt the subtree reached by the real `(action, observation)`; starts
    /// a fresh tree when that history was never simulated. Returns whether a
    /// subtree was reused.
    pub fn advance(&mut self, action: ActionId, observation: &M::Obs) -> bool {
        match self.root().child(action.index(), observation) {
            Some(child) => {
                self.tree.rebase(child);
                true
            }
            None => {
                self.reset();
                false
            }
        }
    }

    pub fn reset(&mut self) {
        self.tree = SearchTree::new(self.action_count);
    }
}

/// Plan from scratch with a throwaway tree.
pub fn plan<M: GenerativeModel, R: Rng + ?Sized>(
    belief: &ParticleBelief<M::State>,
    model: &M,
    config: &PlannerConfig,
    rng: &mut R,
) -> Result<ActionId> {
    Planner::new(model, config.clone())?.plan(model, belief, rng)
}

#[cfg(test)]
mod tests;

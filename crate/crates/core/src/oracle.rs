//! Exact evaluators for tiny problems.
//!
//! [`exact_belief_values`] expands the Bellman recursion over beliefs to a
//! fixed depth with exact Bayes updates. [`solve_mdp_exact`] runs
//! finite-horizon Q-iteration on a fully observable MDP, optionally with
//! potential-based shaping. Both are exponential or tabular and only meant
//! for checking the sampling planner on problems small enough to enumerate.

#![allow(clippy::needless_range_loop)]

use rand::Rng;

use crate::error::{Error, Result};
use crate::pomdp::{ActionId, GenerativeModel, History, StepOutcome};

const ROW_TOLERANCE: f64 = 1e-9;

/// Upper bound on `states * depth * observations` accepted by
/// [`exact_belief_values`].
pub const MAX_EXPANSION: usize = 1000;

/// Tabular POMDP `<S, A, T, R, Omega, O>` with a discount and a start belief.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerablePomdp {
    /// `transition[s][a][s2]`
    transition: Vec<Vec<Vec<f64>>>,
    /// `observation[a][s2][o]`
    observation: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a][s2]`
    reward: Vec<Vec<Vec<f64>>>,
    gamma: f64,
    initial_belief: Vec<f64>,
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    let sum: f64 = row.iter().sum();
    if row.iter().any(|p| !(0.0..=1.0 + ROW_TOLERANCE).contains(p)) || (sum - 1.0).abs() > ROW_TOLERANCE {
        return Err(Error::invalid(format!("{what} is not a distribution (sum {sum})")));
    }
    Ok(())
}

impl EnumerablePomdp {
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        observation: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<Vec<f64>>>,
        gamma: f64,
        initial_belief: Vec<f64>,
    ) -> Result<Self> {
        let states = transition.len();
        if states == 0 {
            return Err(Error::invalid("POMDP needs at least one state"));
        }
        let actions = transition[0].len();
        if actions == 0 {
            return Err(Error::invalid("POMDP needs at least one action"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!("gamma {gamma} outside [0, 1]")));
        }
        if initial_belief.len() != states {
            return Err(Error::invalid("initial belief has the wrong length"));
        }
        check_distribution(&initial_belief, "initial belief")?;
        if reward.len() != states || observation.len() != actions {
            return Err(Error::invalid("table shapes disagree"));
        }
        let observations = observation[0].first().map_or(0, Vec::len);
        if observations == 0 {
            return Err(Error::invalid("POMDP needs at least one observation"));
        }
        for s in 0..states {
            if transition[s].len() != actions || reward[s].len() != actions {
                return Err(Error::invalid(format!("state {s} has the wrong number of actions")));
            }
            for a in 0..actions {
                if transition[s][a].len() != states || reward[s][a].len() != states {
                    return Err(Error::invalid(format!("row ({s}, {a}) has the wrong length")));
                }
                check_distribution(&transition[s][a], &format!("transition row ({s}, {a})"))?;
            }
        }
        for a in 0..actions {
            if observation[a].len() != states {
                return Err(Error::invalid(format!("observation table for action {a} has the wrong shape")));
            }
            for s2 in 0..states {
                if observation[a][s2].len() != observations {
                    return Err(Error::invalid(format!("observation row ({a}, {s2}) has the wrong length")));
                }
                check_distribution(&observation[a][s2], &format!("observation row ({a}, {s2})"))?;
            }
        }
        Ok(Self { transition, observation, reward, gamma, initial_belief })
    }

    /// Two hidden sides; a prize sits behind one of them and moves to the
    /// other side with probability `drift` after every action. Action `i`
    /// opens side `i` and pays 1 when the prize was there; the sensor then
    /// reports whether the prize is (now) behind side `i`, correct with
    /// probability `accuracy`. Observation 1 means "here".
    pub fn noisy_sensor(accuracy: f64, drift: f64, gamma: f64) -> Result<Self> {
        let moves = |s: usize| -> Vec<f64> {
            let mut row = vec![drift; 2];
            row[s] = 1.0 - drift;
            row
        };
        let transition = (0..2).map(|s| vec![moves(s), moves(s)]).collect();
        let reading = |a: usize, s2: usize| -> Vec<f64> {
            if a == s2 {
                vec![1.0 - accuracy, accuracy]
            } else {
                vec![accuracy, 1.0 - accuracy]
            }
        };
        let observation = (0..2).map(|a| (0..2).map(|s2| reading(a, s2)).collect()).collect();
        let reward = (0..2).map(|s| (0..2).map(|a| vec![if s == a { 1.0 } else { 0.0 }; 2]).collect()).collect();
        Self::new(transition, observation, reward, gamma, vec![0.5, 0.5])
    }

    pub fn state_count(&self) -> usize {
        self.transition.len()
    }

    pub fn action_count(&self) -> usize {
        self.transition[0].len()
    }

    pub fn observation_count(&self) -> usize {
        self.observation[0][0].len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial_belief(&self) -> &[f64] {
        &self.initial_belief
    }

    pub fn transition(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.transition[s][a][s2]
    }

    pub fn observation_prob(&self, a: usize, s2: usize, o: usize) -> f64 {
        self.observation[a][s2][o]
    }

    pub fn reward(&self, s: usize, a: usize, s2: usize) -> f64 {
        self.reward[s][a][s2]
    }

    fn action_value(&self, belief: &[f64], a: usize, depth: usize) -> f64 {
        if depth == 0 {
            return 0.0;
        }
        let n = self.state_count();
        let mut immediate = 0.0;
        // Predicted next-state distribution.
        let mut predicted = vec![0.0; n];
        for (s, &bs) in belief.iter().enumerate() {
            if bs == 0.0 {
                continue;
            }
            for s2 in 0..n {
                let p = bs * self.transition[s][a][s2];
                immediate += p * self.reward[s][a][s2];
                predicted[s2] += p;
            }
        }
        let mut future = 0.0;
        if depth > 1 {
            for o in 0..self.observation_count() {
                let mut posterior: Vec<f64> = (0..n).map(|s2| predicted[s2] * self.observation[a][s2][o]).collect();
                let p_obs: f64 = posterior.iter().sum();
                if p_obs <= 0.0 {
                    continue;
                }
                posterior.iter_mut().for_each(|p| *p /= p_obs);
                debug_assert!((posterior.iter().sum::<f64>() - 1.0).abs() <= ROW_TOLERANCE);
                let best = (0..self.action_count())
                    .map(|a2| self.action_value(&posterior, a2, depth - 1))
                    .fold(f64::NEG_INFINITY, f64::max);
                future += p_obs * best;
            }
        }
        immediate + self.gamma * future
    }
}

/// Exact `depth`-step action values at `belief`, indexed by action.
pub fn exact_belief_values(pomdp: &EnumerablePomdp, belief: &[f64], depth: usize) -> Result<Vec<f64>> {
    if belief.len() != pomdp.state_count() {
        return Err(Error::invalid("belief has the wrong length"));
    }
    check_distribution(belief, "belief")?;
    if pomdp.state_count() * depth * pomdp.observation_count() > MAX_EXPANSION {
        return Err(Error::invalid(format!("expansion exceeds {MAX_EXPANSION} state-depth-observation units")));
    }
    Ok((0..pomdp.action_count()).map(|a| pomdp.action_value(belief, a, depth)).collect())
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Sampling view of the tables so the tree search can run on them.
impl GenerativeModel for EnumerablePomdp {
    type State = usize;
    type Obs = usize;
    type Constraints = ();

    fn action_count(&self) -> usize {
        EnumerablePomdp::action_count(self)
    }

    fn initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.initial_belief, rng)
    }

    fn step<R: Rng + ?Sized>(&self, state: &usize, action: ActionId, rng: &mut R) -> StepOutcome<usize, usize> {
        let a = action.index();
        let next = sample_index(&self.transition[*state][a], rng);
        let observation = sample_index(&self.observation[a][next], rng);
        StepOutcome { next_state: next, observation, reward: self.reward[*state][a][next], terminal: false }
    }

    fn is_terminal(&self, _state: &usize) -> bool {
        false
    }

    fn compile_constraints(&self, _history: &History<usize>) {}
}

/// Tabular MDP with optional absorbing terminal states.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp {
    /// `transition[s][a][s2]`
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a][s2]`
    pub reward: Vec<Vec<Vec<f64>>>,
    pub terminal: Vec<bool>,
}

impl FiniteMdp {
    pub fn state_count(&self) -> usize {
        self.transition.len()
    }

    pub fn action_count(&self) -> usize {
        self.transition.first().map_or(0, Vec::len)
    }

    /// Random MDP with dense transition rows, rewards in `[-1, 1]` and a
    /// few terminal states.
    pub fn random<R: Rng + ?Sized>(states: usize, actions: usize, rng: &mut R) -> Self {
        let transition = (0..states)
            .map(|_| {
                (0..actions)
                    .map(|_| {
                        let raw: Vec<f64> = (0..states).map(|_| rng.random::<f64>().powi(3)).collect();
                        let total: f64 = raw.iter().sum();
                        raw.into_iter().map(|w| w / total).collect()
                    })
                    .collect()
            })
            .collect();
        let reward = (0..states)
            .map(|_| (0..actions).map(|_| (0..states).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
            .collect();
        let terminal = (0..states).map(|_| rng.random_bool(0.1)).collect();
        Self { transition, reward, terminal }
    }
}

/// `q[s][a]`
pub type QTable = Vec<Vec<f64>>;

/// Finite-horizon Q-iteration. With a potential `phi`, each transition
/// reward becomes `r + gamma * alpha * phi(s2) - alpha * phi(s)`, where the
/// potential of a terminal state, and of any state reached on the last step
/// of the horizon, is zero.
pub fn solve_mdp_exact(
    mdp: &FiniteMdp,
    gamma: f64,
    horizon: usize,
    potential: Option<&[f64]>,
    alpha: f64,
) -> Result<QTable> {
    if horizon < 1 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let n = mdp.state_count();
    let m = mdp.action_count();
    if let Some(phi) = potential {
        if phi.len() != n {
            return Err(Error::invalid("potential has the wrong length"));
        }
    }
    let phi = |s: usize, last_step: bool| match potential {
        Some(phi) if !last_step && !mdp.terminal[s] => alpha * phi[s],
        _ => 0.0,
    };
    let mut value = vec![0.0; n];
    let mut q = vec![vec![0.0; m]; n];
    for steps_left in 1..=horizon {
        let last_step = steps_left == 1;
        for s in 0..n {
            if mdp.terminal[s] {
                continue;
            }
            let origin = potential.map_or(0.0, |phi| alpha * phi[s]);
            for a in 0..m {
                q[s][a] = (0..n)
                    .map(|s2| {
                        let tail = if mdp.terminal[s2] { 0.0 } else { value[s2] };
                        let shaped = gamma * phi(s2, last_step) - origin;
                        mdp.transition[s][a][s2] * (mdp.reward[s][a][s2] + shaped + gamma * tail)
                    })
                    .sum();
            }
        }
        for s in 0..n {
            value[s] = if mdp.terminal[s] { 0.0 } else { q[s].iter().copied().fold(f64::NEG_INFINITY, f64::max) };
        }
    }
    Ok(q)
}

/// Lowest-index action whose value is within `tolerance` of the row maximum.
pub fn greedy_action(row: &[f64], tolerance: f64) -> usize {
    let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    row.iter().position(|&v| v >= best - tolerance).unwrap_or(0)
}
